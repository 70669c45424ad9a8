//! Weighted inner products, Gram matrices, the eigenvalue tower of the
//! partial-sum operators, and the interpolation rank of the lattice.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{enumerate_h, enumerate_v, weight, DomainSpec, LatticeDomain};
use crate::error::{Error, Result};
use crate::exact::{rat, MultiIndex, Rational, RationalString};
use crate::families::{norm_b, HahnParams};
use crate::operators::LatticeOperators;
use crate::poly::Poly;
use crate::sparse::SparseMatrix;

/// Largest `|V|` accepted by [`interpolation_rank`].
pub const RANK_BOUND: usize = 500;

/// Which cyclic relabeling of homogeneous coordinates defines the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `Q_nu(x; l, N)`.
    Standard,
    /// `Q_nu(τx; τl, N)` with `τx = (x_2, ..., x_{d+1}, x_1)`.
    Forward,
    /// `Q_nu(τ⁻¹x; τ⁻¹l, N)` with `τ⁻¹x = (x_{d+1}, x_1, ..., x_d)`.
    Backward,
}

impl Basis {
    /// 0-based source coordinate of each relabeled homogeneous coordinate.
    fn perm(self, d: usize) -> Vec<usize> {
        match self {
            Basis::Standard => (0..=d).collect(),
            Basis::Forward => (1..=d).chain([0]).collect(),
            Basis::Backward => [d].into_iter().chain(0..d).collect(),
        }
    }

    /// Relabeling `σ` (1-based) such that the basis diagonalizes
    /// `sum_{k <= i < j} L_{σ(i), σ(j)}`.
    pub fn relabel(self, d: usize) -> impl Fn(usize) -> usize {
        let perm = self.perm(d);
        move |i| perm[i - 1] + 1
    }

    pub fn spec(self, spec: &DomainSpec) -> DomainSpec {
        spec.permuted(&self.perm(spec.d()))
    }
}

/// `sum_{x in V} f(x) g(x) H(x)`.
pub fn inner_product(spec: &DomainSpec, f: &[Rational], g: &[Rational]) -> Result<Rational> {
    let dom = enumerate_v(spec);
    if f.len() != dom.len() || g.len() != dom.len() {
        return Err(Error::LengthMismatch { expected: dom.len(), got: f.len().max(g.len()) });
    }
    let w = weights(spec, &dom)?;
    Ok(f.iter().zip(g).zip(&w).map(|((a, b), c)| a * b * c).sum())
}

fn weights(spec: &DomainSpec, dom: &LatticeDomain) -> Result<Vec<Rational>> {
    dom.points().iter().map(|x| weight(spec, x)).collect()
}

/// Values of the basis polynomial `nu` at the points of `V`, in domain order.
pub fn lattice_vector(spec: &DomainSpec, dom: &LatticeDomain, basis: Basis, nu: &[u32]) -> Result<Vec<Rational>> {
    let d = spec.d();
    let perm = basis.perm(d);
    let pspec = basis.spec(spec);
    if !pspec.contains_index(nu) {
        return Err(Error::IndexOutsideH(nu.to_vec()));
    }
    let params = HahnParams::from_spec(&pspec);
    dom.points()
        .iter()
        .map(|x| {
            let xh = spec.homogeneous(x);
            let y: Vec<u32> = perm[..d].iter().map(|&p| xh[p] as u32).collect();
            params.eval(nu, &y)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GramMatrix {
    pub spec: DomainSpec,
    pub basis: Basis,
    pub indices: Vec<MultiIndex>,
    #[serde(skip)]
    pub entries: Vec<Vec<Rational>>,
}

impl GramMatrix {
    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, v)| i == j || v.is_zero()))
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        self.entries.iter().enumerate().map(|(i, r)| r[i].clone()).collect()
    }

    /// Diagonal entrywise equal to the closed-form norms.
    pub fn matches_norms(&self) -> Result<bool> {
        let pspec = self.basis.spec(&self.spec);
        for (nu, v) in self.indices.iter().zip(self.diagonal()) {
            if norm_b(&pspec, nu)? != v {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Gram matrix of the chosen basis over `H` of the relabeled spec.
pub fn gram_basis(spec: &DomainSpec, basis: Basis) -> Result<GramMatrix> {
    let dom = enumerate_v(spec);
    let w = weights(spec, &dom)?;
    let indices = enumerate_h(&basis.spec(spec)).indices().to_vec();
    let vecs: Vec<Vec<Rational>> =
        indices.par_iter().map(|nu| lattice_vector(spec, &dom, basis, nu)).collect::<Result<_>>()?;
    let weighted: Vec<Vec<Rational>> = vecs.iter().map(|v| v.iter().zip(&w).map(|(a, b)| a * b).collect()).collect();
    let entries = (0..vecs.len())
        .into_par_iter()
        .map(|i| (0..vecs.len()).map(|j| weighted[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    Ok(GramMatrix { spec: spec.clone(), basis, indices, entries })
}

pub fn gram(spec: &DomainSpec) -> Result<GramMatrix> {
    gram_basis(spec, Basis::Standard)
}

/// `|nu^k| (|l^k| - |nu^k| + 1)` for `k = 1..=d`.
pub fn tower_eigenvalues(ell: &[u32], nu: &[u32]) -> Vec<i64> {
    let d = nu.len();
    (1..=d)
        .map(|k| {
            let nk: i64 = nu[k - 1..].iter().map(|&v| v as i64).sum();
            let lk: i64 = ell[k - 1..].iter().map(|&v| v as i64).sum();
            nk * (lk - nk + 1)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenEntry {
    pub nu: MultiIndex,
    pub lambda: Vec<i64>,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectraReport {
    pub spec: DomainSpec,
    pub basis: Basis,
    pub eigenvalues: Vec<EigenEntry>,
    /// Pairs of indices sharing a joint eigenvalue tuple (diagnostic only).
    pub collisions: Vec<(MultiIndex, MultiIndex)>,
    pub exact: bool,
}

/// Checks `M_k q_nu = λ_k q_nu` exactly for every `nu` and `k`, where `M_k`
/// is the partial sum relabeled to match the basis.
pub fn verify_spectra_basis(spec: &DomainSpec, basis: Basis) -> Result<SpectraReport> {
    let ops = LatticeOperators::hahn(spec)?;
    verify_spectra_with(&ops, basis)
}

pub fn verify_spectra(spec: &DomainSpec) -> Result<SpectraReport> {
    verify_spectra_basis(spec, Basis::Standard)
}

pub fn verify_spectra_with(ops: &LatticeOperators, basis: Basis) -> Result<SpectraReport> {
    let spec = ops.domain().spec().clone();
    let d = spec.d();
    let pspec = basis.spec(&spec);
    let sigma = basis.relabel(d);
    let ms: Vec<SparseMatrix> = (1..=d).map(|k| ops.relabeled_m(k, &sigma)).collect();
    let indices = enumerate_h(&pspec).indices().to_vec();
    let eigenvalues: Vec<EigenEntry> = indices
        .par_iter()
        .map(|nu| {
            let q = lattice_vector(&spec, ops.domain(), basis, nu)?;
            let lambda = tower_eigenvalues(pspec.ell(), nu);
            let exact = ms.iter().zip(&lambda).all(|(m, &l)| {
                let l = rat(l);
                m.mul_vec(&q).iter().zip(&q).all(|(a, b)| *a == &l * b)
            });
            Ok(EigenEntry { nu: nu.clone(), lambda, exact })
        })
        .collect::<Result<_>>()?;
    let mut collisions = Vec::new();
    let mut sorted: Vec<&EigenEntry> = eigenvalues.iter().collect();
    sorted.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    for w in sorted.windows(2) {
        if w[0].lambda == w[1].lambda {
            collisions.push((w[0].nu.clone(), w[1].nu.clone()));
        }
    }
    let exact = eigenvalues.iter().all(|e| e.exact);
    Ok(SpectraReport { spec, basis, eigenvalues, collisions, exact })
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank of the evaluation matrix of all monomials of degree `<= N` at the
/// points of `V`.
pub fn interpolation_rank(spec: &DomainSpec) -> Result<usize> {
    let dom = enumerate_v(spec);
    if dom.len() > RANK_BOUND {
        return Err(Error::TooLarge { size: dom.len(), bound: RANK_BOUND });
    }
    let monomials = Poly::monomials_up_to(spec.d(), spec.n());
    let matrix = dom
        .points()
        .iter()
        .map(|x| {
            monomials
                .iter()
                .map(|e| x.0.iter().zip(e).map(|(&xi, &k)| BigInt::from(xi).pow(k)).product())
                .collect()
        })
        .collect();
    Ok(bareiss_rank(matrix))
}

/// JSON-facing summary of a Gram matrix.
#[derive(Clone, Debug, Serialize)]
pub struct GramSummary {
    pub spec: DomainSpec,
    pub basis: Basis,
    pub indices: Vec<MultiIndex>,
    pub diagonal: Vec<RationalString>,
    pub diagonal_only: bool,
    pub matches_norms: bool,
    pub exact: bool,
}

impl GramMatrix {
    pub fn summary(&self) -> Result<GramSummary> {
        let diagonal_only = self.is_diagonal();
        let matches_norms = self.matches_norms()?;
        Ok(GramSummary {
            spec: self.spec.clone(),
            basis: self.basis,
            indices: self.indices.clone(),
            diagonal: self.diagonal().into_iter().map(RationalString).collect(),
            diagonal_only,
            matches_norms,
            exact: diagonal_only && matches_norms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{admissible_specs, check_admissible, count_v};
    use crate::exact::ratio;

    #[test]
    fn inner_products_on_hexagon() {
        let spec = check_admissible(2, 3, &[2, 2, 2]).unwrap();
        let dom = enumerate_v(&spec);
        let one = vec![rat(1); dom.len()];
        assert_eq!(inner_product(&spec, &one, &one).unwrap(), rat(1));
        let q10 = lattice_vector(&spec, &dom, Basis::Standard, &[1, 0]).unwrap();
        let q01 = lattice_vector(&spec, &dom, Basis::Standard, &[0, 1]).unwrap();
        assert_eq!(inner_product(&spec, &q10, &q01).unwrap(), rat(0));
        assert_eq!(inner_product(&spec, &q10, &q10).unwrap(), ratio(1, 10));
        assert!(matches!(inner_product(&spec, &one[1..], &one), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn gram_diagonal_all_bases() {
        for (d, n, ell) in [(2, 3, vec![2, 2, 2]), (2, 6, vec![4, 4, 2]), (3, 4, vec![3, 3, 3, 3])] {
            let spec = check_admissible(d, n, &ell).unwrap();
            for basis in [Basis::Standard, Basis::Forward, Basis::Backward] {
                let g = gram_basis(&spec, basis).unwrap();
                assert!(g.is_diagonal(), "{spec:?} {basis:?}");
                assert!(g.matches_norms().unwrap(), "{spec:?} {basis:?}");
            }
        }
        let spec = check_admissible(3, 4, &[3, 3, 3, 3]).unwrap();
        assert_eq!(gram(&spec).unwrap().indices.len(), 31);
    }

    #[test]
    fn worked_eigenvalues() {
        let spec = check_admissible(2, 3, &[2, 2, 2]).unwrap();
        let rep = verify_spectra(&spec).unwrap();
        assert!(rep.exact);
        let e = rep.eigenvalues.iter().find(|e| e.nu.0 == [1, 1]).unwrap();
        assert_eq!(e.lambda, vec![10, 4]);
        let zero = rep.eigenvalues.iter().find(|e| e.nu.0 == [0, 0]).unwrap();
        assert_eq!(zero.lambda, vec![0, 0]);
    }

    #[test]
    fn spectra_sweep_small() {
        for d in 2..=3 {
            for n in 1..=4 {
                for spec in admissible_specs(d, n) {
                    for basis in [Basis::Standard, Basis::Forward, Basis::Backward] {
                        assert!(verify_spectra_basis(&spec, basis).unwrap().exact, "{spec:?} {basis:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn rank_examples() {
        let spec = check_admissible(2, 3, &[2, 2, 2]).unwrap();
        assert_eq!(interpolation_rank(&spec).unwrap(), 7);
        let simplex = DomainSpec::simplex(2, 5).unwrap();
        assert_eq!(interpolation_rank(&simplex).unwrap(), 21);
        let spec = check_admissible(2, 9, &[7, 6, 7]).unwrap();
        assert_eq!(interpolation_rank(&spec).unwrap() as u64, count_v(&spec));
        let big = DomainSpec::simplex(3, 14).unwrap();
        assert!(matches!(interpolation_rank(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn bareiss_on_known_matrices() {
        let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        assert_eq!(bareiss_rank(m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(bareiss_rank(m(&[&[0, 1], &[1, 0]])), 2);
        assert_eq!(bareiss_rank(m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(bareiss_rank(m(&[&[2, 3, 5], &[4, 6, 10], &[1, 1, 1]])), 2);
    }
}
