//! Exact sparse square matrices over the rationals.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::exact::Rational;

/// Row-major sparse matrix; explicit zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix { n, rows: vec![BTreeMap::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::zeros(n);
        for i in 0..n {
            m.add_entry(i, i, Rational::from_integer(1.into()));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.rows[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (&usize, &Rational)> {
        self.rows[r].iter()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: Rational) {
        if v.is_zero() {
            return;
        }
        match self.rows[r].entry(c) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// All nonzero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone())))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// First nonzero entry, if any.
    pub fn first_nonzero(&self) -> Option<(usize, usize, Rational)> {
        self.rows
            .iter()
            .enumerate()
            .find_map(|(r, row)| row.iter().next().map(|(c, v)| (r, *c, v.clone())))
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (r, row) in other.rows.iter().enumerate() {
            for (c, v) in row {
                out.add_entry(r, *c, v.clone());
            }
        }
        out
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (r, row) in other.rows.iter().enumerate() {
            for (c, v) in row {
                out.add_entry(r, *c, -v.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        if s.is_zero() {
            return SparseMatrix::zeros(self.n);
        }
        SparseMatrix {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, v * s)).collect())
                .collect(),
        }
    }

    /// Matrix product `self * other`; rows are computed in parallel.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let rows = self
            .rows
            .par_iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.rows[*k] {
                        *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                    }
                }
                acc.retain(|_, v| !v.is_zero());
                acc
            })
            .collect();
        SparseMatrix { n: self.n, rows }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.n);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                out.rows[*c].insert(r, v.clone());
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c])
            })
            .collect()
    }

    /// `diag(w) * self`.
    pub fn left_diag(&self, w: &[Rational]) -> SparseMatrix {
        SparseMatrix {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(w)
                .map(|(row, s)| row.iter().map(|(c, v)| (*c, v * s)).collect())
                .collect(),
        }
    }

    /// `self * diag(w)`.
    pub fn right_diag(&self, w: &[Rational]) -> SparseMatrix {
        SparseMatrix {
            n: self.n,
            rows: self.rows.iter().map(|row| row.iter().map(|(c, v)| (*c, v * &w[*c])).collect()).collect(),
        }
    }

    pub fn commutator(&self, other: &SparseMatrix) -> SparseMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &SparseMatrix) -> SparseMatrix {
        self.mul(other).add(&other.mul(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn sample() -> (SparseMatrix, SparseMatrix) {
        let mut a = SparseMatrix::zeros(3);
        a.add_entry(0, 1, rat(2));
        a.add_entry(1, 2, rat(-1));
        a.add_entry(2, 2, rat(3));
        let mut b = SparseMatrix::zeros(3);
        b.add_entry(1, 0, rat(1));
        b.add_entry(2, 1, rat(5));
        (a, b)
    }

    #[test]
    fn product_matches_dense() {
        let (a, b) = sample();
        let p = a.mul(&b);
        for r in 0..3 {
            for c in 0..3 {
                let mut want = rat(0);
                for k in 0..3 {
                    want += a.get(r, k) * b.get(k, c);
                }
                assert_eq!(p.get(r, c), want);
            }
        }
    }

    #[test]
    fn commutator_identities() {
        let (a, b) = sample();
        assert!(a.commutator(&a).is_zero());
        assert_eq!(a.anticommutator(&b), b.anticommutator(&a));
        assert_eq!(a.commutator(&b), b.commutator(&a).scale(&rat(-1)));
    }

    #[test]
    fn entries_cancel() {
        let mut a = SparseMatrix::zeros(2);
        a.add_entry(0, 0, rat(1));
        a.add_entry(0, 0, rat(-1));
        assert!(a.is_zero());
        assert_eq!(a.nnz(), 0);
        assert!(SparseMatrix::identity(4).sub(&SparseMatrix::identity(4)).is_zero());
    }
}
