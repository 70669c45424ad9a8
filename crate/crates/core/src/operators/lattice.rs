//! Exact sparse matrices for the Hahn and Krawtchouk operators on their
//! finite lattices. Indices are 1-based homogeneous indices `1..=d+1`;
//! `x_{d+1} = N - |x|`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::domains::{enumerate_v, weight, DomainSpec, LatticeDomain};
use crate::error::{Error, Result};
use crate::exact::{rat, Rational};
use crate::families::{krawtchouk_weight, FamilyParams};
use crate::sparse::SparseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeFamily {
    Hahn(DomainSpec),
    Krawtchouk { p: Vec<Rational>, n: u32 },
}

/// All pair operators `L_{i,j}` of one lattice family, built once.
#[derive(Clone, Debug)]
pub struct LatticeOperators {
    family: LatticeFamily,
    domain: LatticeDomain,
    // pair[i][j] for 1 <= i < j <= d+1, stored at [i-1][j-1]
    pairs: Vec<Vec<Option<SparseMatrix>>>,
    params: Vec<Rational>,
}

/// Applies `sum_s c_s(x) E^s - (sum_s c_s(x)) I` row by row, where shifts
/// are homogeneous integer vectors; a shift leaving the domain must carry a
/// zero total coefficient.
fn assemble(domain: &LatticeDomain, coefs: impl Fn(&[i64]) -> BTreeMap<Vec<i64>, Rational>) -> Result<SparseMatrix> {
    let spec = domain.spec();
    let mut m = SparseMatrix::zeros(domain.len());
    for (r, x) in domain.points().iter().enumerate() {
        let xh = spec.homogeneous(x);
        for (shift, c) in coefs(&xh) {
            if c.is_zero() || shift.iter().all(|&v| v == 0) {
                continue;
            }
            let target: Vec<i64> = xh.iter().zip(&shift).map(|(a, b)| a + b).collect();
            match domain.index_of_homogeneous(&target) {
                Some(col) => {
                    m.add_entry(r, col, c.clone());
                    m.add_entry(r, r, -c);
                }
                None => {
                    return Err(Error::InternalConsistency(format!(
                        "shift {shift:?} leaves the domain at {x} with coefficient {c}"
                    )))
                }
            }
        }
    }
    Ok(m)
}

fn hop(d1: usize, i: usize, j: usize) -> Vec<i64> {
    let mut s = vec![0i64; d1];
    s[i - 1] += 1;
    s[j - 1] -= 1;
    s
}

impl LatticeOperators {
    pub fn hahn(spec: &DomainSpec) -> Result<Self> {
        Self::build(LatticeFamily::Hahn(spec.clone()), enumerate_v(spec))
    }

    pub fn krawtchouk(p: &[Rational], n: u32) -> Result<Self> {
        FamilyParams::Krawtchouk { p: p.to_vec(), n }.validate()?;
        let domain = enumerate_v(&DomainSpec::simplex(p.len(), n)?);
        Self::build(LatticeFamily::Krawtchouk { p: p.to_vec(), n }, domain)
    }

    fn build(family: LatticeFamily, domain: LatticeDomain) -> Result<Self> {
        let d1 = domain.spec().d() + 1;
        let params = match &family {
            LatticeFamily::Hahn(spec) => spec.ell_rational(),
            LatticeFamily::Krawtchouk { p, .. } => {
                let mut v = p.clone();
                v.push(rat(1) - p.iter().sum::<Rational>());
                v
            }
        };
        let mut ops = LatticeOperators { family, domain, pairs: vec![vec![None; d1]; d1], params };
        for i in 1..=d1 {
            for j in i + 1..=d1 {
                let m = ops.assemble_pair(i, j)?;
                ops.pairs[i - 1][j - 1] = Some(m);
            }
        }
        Ok(ops)
    }

    pub fn family(&self) -> &LatticeFamily {
        &self.family
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn d(&self) -> usize {
        self.domain.spec().d()
    }

    /// Homogeneous parameter vector: `l` for Hahn, `(p, 1-|p|)` for Krawtchouk.
    pub fn params(&self) -> &[Rational] {
        &self.params
    }

    /// Coefficient of `E_i E_j^{-1}` in `L_{i,j}` at homogeneous point `xh`.
    fn hop_coef(&self, i: usize, j: usize, xh: &[i64]) -> Rational {
        match &self.family {
            LatticeFamily::Hahn(spec) => rat(xh[j - 1] * (xh[i - 1] - spec.ell()[i - 1] as i64)),
            LatticeFamily::Krawtchouk { .. } => &self.params[i - 1] * rat(xh[j - 1]),
        }
    }

    fn assemble_pair(&self, i: usize, j: usize) -> Result<SparseMatrix> {
        let d1 = self.d() + 1;
        assemble(&self.domain, |xh| {
            let mut c = BTreeMap::new();
            c.insert(hop(d1, i, j), self.hop_coef(i, j, xh));
            *c.entry(hop(d1, j, i)).or_insert_with(Rational::zero) += self.hop_coef(j, i, xh);
            c
        })
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let d1 = self.d() + 1;
        if i == j || i == 0 || j == 0 || i > d1 || j > d1 {
            return Err(Error::UnsupportedPair(i, j));
        }
        Ok(())
    }

    /// `L_{i,j}` (symmetric in `i, j`).
    pub fn l(&self, i: usize, j: usize) -> Result<&SparseMatrix> {
        self.check_pair(i, j)?;
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Ok(self.pairs[a - 1][b - 1].as_ref().expect("all pairs are built"))
    }

    pub(crate) fn lu(&self, i: usize, j: usize) -> &SparseMatrix {
        self.l(i, j).expect("pair indices validated by caller")
    }

    /// `M_k = sum_{k <= i < j <= d+1} L_{i,j}`; zero for `k > d`.
    pub fn m(&self, k: usize) -> SparseMatrix {
        self.relabeled_m(k, |i| i)
    }

    /// `sum_{k <= i < j <= d+1} L_{σ(i), σ(j)}` for a relabeling `σ`.
    pub fn relabeled_m(&self, k: usize, sigma: impl Fn(usize) -> usize) -> SparseMatrix {
        let d1 = self.d() + 1;
        let mut acc = SparseMatrix::zeros(self.domain.len());
        for i in k.max(1)..=d1 {
            for j in i + 1..=d1 {
                acc = acc.add(self.lu(sigma(i), sigma(j)));
            }
        }
        acc
    }

    /// The full operator `sum_{i<j} L_{i,j}`.
    pub fn full(&self) -> SparseMatrix {
        self.m(1)
    }

    /// The operator in affine difference form: for Hahn
    /// `sum_{i!=j<=d} α_ij (E_iE_j^{-1}-1) + sum β_i (E_i-1) + sum γ_i (E_i^{-1}-1)`;
    /// for Krawtchouk `sum (δ_ij - p_i) x_j Δ_i ∇_j + sum (p_i N - x_i) Δ_i`.
    pub fn expanded(&self) -> Result<SparseMatrix> {
        let d = self.d();
        let d1 = d + 1;
        let e = |i: usize, sign: i64| {
            // affine unit shift, realized homogeneously as e_i - e_{d+1}
            let mut s = vec![0i64; d1];
            s[i - 1] += sign;
            s[d] -= sign;
            s
        };
        match &self.family {
            LatticeFamily::Hahn(spec) => {
                let ell = spec.ell();
                let n = spec.n() as i64;
                assemble(&self.domain, |xh| {
                    let rest = n - xh[..d].iter().sum::<i64>();
                    let mut c: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
                    for i in 1..=d {
                        let xi = xh[i - 1];
                        let li = ell[i - 1] as i64;
                        for j in 1..=d {
                            if i != j {
                                *c.entry(hop(d1, i, j)).or_insert_with(Rational::zero) += rat(xh[j - 1] * (xi - li));
                            }
                        }
                        *c.entry(e(i, 1)).or_insert_with(Rational::zero) += rat((xi - li) * rest);
                        *c.entry(e(i, -1)).or_insert_with(Rational::zero) += rat(xi * (rest - ell[d] as i64));
                    }
                    c
                })
            }
            LatticeFamily::Krawtchouk { p, n } => {
                let n = *n as i64;
                assemble(&self.domain, |xh| {
                    let mut c: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
                    let mut add = |s: Vec<i64>, v: Rational| *c.entry(s).or_insert_with(Rational::zero) += v;
                    for i in 1..=d {
                        for j in 1..=d {
                            let delta = if i == j { rat(1) } else { rat(0) };
                            let w = (delta - &p[i - 1]) * rat(xh[j - 1]);
                            // Δ_i ∇_j = E_i - E_i E_j^{-1} - 1 + E_j^{-1}
                            add(e(i, 1), w.clone());
                            let mut both = e(i, 1);
                            for (a, b) in both.iter_mut().zip(e(j, -1)) {
                                *a += b;
                            }
                            add(both, -w.clone());
                            add(e(j, -1), w);
                        }
                        add(e(i, 1), &p[i - 1] * rat(n) - rat(xh[i - 1]));
                    }
                    c
                })
            }
        }
    }

    /// Diagonal of the orthogonality weight in domain order.
    pub fn weights(&self) -> Result<Vec<Rational>> {
        let pts = self.domain.points();
        match &self.family {
            LatticeFamily::Hahn(spec) => pts.iter().map(|x| weight(spec, x)).collect(),
            LatticeFamily::Krawtchouk { p, n } => pts.iter().map(|x| krawtchouk_weight(p, *n, x)).collect(),
        }
    }
}
