//! Difference and differential operators in two exact representations, and
//! verifiers for their commutation relations.
//!
//! Lattice families (Hahn, Krawtchouk) are sparse matrices over the finite
//! domain, so a zero matrix is a zero operator. Polynomial families act on
//! the polynomial ring and are compared on all monomials up to a degree.

pub mod lattice;
pub mod polyop;
pub mod symbolic;

use serde::Serialize;

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::exact::{rat, Rational, RationalString};
use crate::families::FamilyParams;
use crate::poly::Poly;
use crate::sparse::SparseMatrix;

pub use lattice::{LatticeFamily, LatticeOperators};
pub use polyop::{Action, PolyOperator, TermBuilder};
pub use symbolic::{charlier_expanded, meixner_expanded, rational_sqrt, PolyFamily, RescaledCharlier};

/// Default monomial degree bound for polynomial-representation checks.
pub const DEFAULT_DEGREE: u32 = 6;

/// A witness that an operator is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Matrix {
        row: usize,
        col: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        point: Option<Vec<u32>>,
        value: RationalString,
    },
    Monomial { exponent: Vec<u32>, image: String },
}

/// Algebra operations shared by both representations.
pub trait Operator: Clone {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
    /// `self ∘ other`.
    fn compose(&self, other: &Self) -> Self;

    fn commutator(&self, other: &Self) -> Self {
        self.compose(other).minus(&other.compose(self))
    }

    fn anticommutator(&self, other: &Self) -> Self {
        self.compose(other).plus(&other.compose(self))
    }

    /// `None` iff the operator is zero (matrices) or annihilates every
    /// monomial of degree `<= degree` (polynomial operators).
    fn nonzero_witness(&self, degree: u32) -> Option<Witness>;
}

impl Operator for SparseMatrix {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn nonzero_witness(&self, _degree: u32) -> Option<Witness> {
        self.first_nonzero()
            .map(|(row, col, v)| Witness::Matrix { row, col, point: None, value: RationalString(v) })
    }
}

impl Operator for PolyOperator {
    fn plus(&self, other: &Self) -> Self {
        PolyOperator::plus(self, other)
    }
    fn minus(&self, other: &Self) -> Self {
        PolyOperator::minus(self, other)
    }
    fn scaled(&self, c: &Rational) -> Self {
        PolyOperator::scaled(self, c)
    }
    fn compose(&self, other: &Self) -> Self {
        PolyOperator::compose(self, other)
    }
    fn nonzero_witness(&self, degree: u32) -> Option<Witness> {
        self.find_nonzero(degree)
            .map(|(exponent, img)| Witness::Monomial { exponent, image: img.to_string() })
    }
}

/// Either representation; binary operations require matching ones.
#[derive(Clone, Debug)]
pub enum AnyOperator {
    Lattice(SparseMatrix),
    Poly(PolyOperator),
}

impl AnyOperator {
    fn binary(
        &self,
        other: &AnyOperator,
        fm: impl Fn(&SparseMatrix, &SparseMatrix) -> SparseMatrix,
        fp: impl Fn(&PolyOperator, &PolyOperator) -> PolyOperator,
    ) -> Result<AnyOperator> {
        match (self, other) {
            (AnyOperator::Lattice(a), AnyOperator::Lattice(b)) if a.dim() == b.dim() => Ok(AnyOperator::Lattice(fm(a, b))),
            (AnyOperator::Poly(a), AnyOperator::Poly(b)) if a.nvars() == b.nvars() => Ok(AnyOperator::Poly(fp(a, b))),
            _ => Err(Error::RepresentationMismatch),
        }
    }

    pub fn plus(&self, other: &AnyOperator) -> Result<AnyOperator> {
        self.binary(other, |a, b| a.add(b), |a, b| a.plus(b))
    }

    pub fn minus(&self, other: &AnyOperator) -> Result<AnyOperator> {
        self.binary(other, |a, b| a.sub(b), |a, b| a.minus(b))
    }

    pub fn compose(&self, other: &AnyOperator) -> Result<AnyOperator> {
        self.binary(other, |a, b| a.mul(b), |a, b| a.compose(b))
    }

    pub fn commutator(&self, other: &AnyOperator) -> Result<AnyOperator> {
        self.binary(other, |a, b| a.commutator(b), |a, b| a.commutator(b))
    }

    pub fn anticommutator(&self, other: &AnyOperator) -> Result<AnyOperator> {
        self.binary(other, |a, b| a.anticommutator(b), |a, b| a.anticommutator(b))
    }

    pub fn scaled(&self, c: &Rational) -> AnyOperator {
        match self {
            AnyOperator::Lattice(a) => AnyOperator::Lattice(a.scale(c)),
            AnyOperator::Poly(a) => AnyOperator::Poly(a.scaled(c)),
        }
    }

    pub fn nonzero_witness(&self, degree: u32) -> Option<Witness> {
        match self {
            AnyOperator::Lattice(a) => a.nonzero_witness(degree),
            AnyOperator::Poly(a) => a.nonzero_witness(degree),
        }
    }

    pub fn as_matrix(&self) -> Option<&SparseMatrix> {
        match self {
            AnyOperator::Lattice(a) => Some(a),
            AnyOperator::Poly(_) => None,
        }
    }

    pub fn as_poly(&self) -> Option<&PolyOperator> {
        match self {
            AnyOperator::Poly(a) => Some(a),
            AnyOperator::Lattice(_) => None,
        }
    }
}

/// One checked identity `expr = 0` (or, for a stated non-relation, `expr != 0`).
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub indices: Vec<usize>,
    pub expect_zero: bool,
    pub is_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.expect_zero == self.is_zero
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub family: String,
    /// Monomial degree bound for polynomial representations; `None` for
    /// matrix identities, which are exact on the whole lattice.
    pub bounded_degree: Option<u32>,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(RelationCheck::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }

    fn extend(&mut self, other: RelationReport) {
        self.checks.extend(other.checks);
    }
}

/// All operator families, in their natural representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorFamily {
    Hahn(DomainSpec),
    Krawtchouk { p: Vec<Rational>, n: u32 },
    Meixner { s: Rational, c: Vec<Rational> },
    Charlier { a: Vec<Rational> },
    Oscillator { d: usize },
    GaugedOscillator { d: usize },
}

/// A family with its operators built once.
#[derive(Clone, Debug)]
pub enum Realized {
    Lattice(LatticeOperators),
    Poly(PolyFamily, u32),
}

impl OperatorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorFamily::Hahn(_) => "hahn",
            OperatorFamily::Krawtchouk { .. } => "krawtchouk",
            OperatorFamily::Meixner { .. } => "meixner",
            OperatorFamily::Charlier { .. } => "charlier",
            OperatorFamily::Oscillator { .. } => "oscillator",
            OperatorFamily::GaugedOscillator { .. } => "gauged-oscillator",
        }
    }

    pub fn d(&self) -> usize {
        match self {
            OperatorFamily::Hahn(spec) => spec.d(),
            OperatorFamily::Krawtchouk { p, .. } => p.len(),
            OperatorFamily::Meixner { c, .. } => c.len(),
            OperatorFamily::Charlier { a } => a.len(),
            OperatorFamily::Oscillator { d } | OperatorFamily::GaugedOscillator { d } => *d,
        }
    }

    /// Builds the representation; `degree` bounds polynomial checks.
    pub fn realize(&self, degree: u32) -> Result<Realized> {
        Ok(match self {
            OperatorFamily::Hahn(spec) => Realized::Lattice(LatticeOperators::hahn(spec)?),
            OperatorFamily::Krawtchouk { p, n } => Realized::Lattice(LatticeOperators::krawtchouk(p, *n)?),
            OperatorFamily::Meixner { s, c } => {
                Realized::Poly(checked(PolyFamily::Meixner { s: s.clone(), c: c.clone() })?, degree)
            }
            OperatorFamily::Charlier { a } => Realized::Poly(checked(PolyFamily::Charlier { a: a.clone() })?, degree),
            OperatorFamily::Oscillator { d } => Realized::Poly(checked(PolyFamily::Oscillator { d: *d })?, degree),
            OperatorFamily::GaugedOscillator { d } => {
                Realized::Poly(checked(PolyFamily::GaugedOscillator { d: *d })?, degree)
            }
        })
    }

    pub fn build_lij(&self, i: usize, j: usize) -> Result<AnyOperator> {
        self.realize(DEFAULT_DEGREE)?.l(i, j)
    }

    pub fn build_m(&self, k: usize) -> Result<AnyOperator> {
        let d = self.d();
        if k == 0 || k > d {
            return Err(Error::OutOfRange(format!("k = {k} must lie in 1..={d}")));
        }
        match self.realize(DEFAULT_DEGREE)? {
            Realized::Lattice(ops) => Ok(AnyOperator::Lattice(ops.m(k))),
            Realized::Poly(f, _) => {
                let mut acc = PolyOperator::zero(d);
                for i in k..=d + 1 {
                    for j in i + 1..=d + 1 {
                        acc = acc.plus(&f.l(i, j)?);
                    }
                }
                Ok(AnyOperator::Poly(acc))
            }
        }
    }
}

fn checked(f: PolyFamily) -> Result<PolyFamily> {
    f.validate()?;
    Ok(f)
}

impl Realized {
    pub fn d(&self) -> usize {
        match self {
            Realized::Lattice(ops) => ops.d(),
            Realized::Poly(f, _) => f.d(),
        }
    }

    pub fn l(&self, i: usize, j: usize) -> Result<AnyOperator> {
        match self {
            Realized::Lattice(ops) => Ok(AnyOperator::Lattice(ops.l(i, j)?.clone())),
            Realized::Poly(f, _) => Ok(AnyOperator::Poly(f.l(i, j)?)),
        }
    }

    /// True for the Charlier and oscillator families, whose relations
    /// single out the index `d+1`.
    pub fn has_boundary_pairs(&self) -> bool {
        matches!(
            self,
            Realized::Poly(PolyFamily::Charlier { .. } | PolyFamily::Oscillator { .. } | PolyFamily::GaugedOscillator { .. }, _)
        )
    }

    fn degree(&self) -> Option<u32> {
        match self {
            Realized::Lattice(_) => None,
            Realized::Poly(_, d) => Some(*d),
        }
    }

    fn family_name(&self) -> String {
        match self {
            Realized::Lattice(ops) => match ops.family() {
                LatticeFamily::Hahn(_) => "hahn".into(),
                LatticeFamily::Krawtchouk { .. } => "krawtchouk".into(),
            },
            Realized::Poly(f, _) => match f {
                PolyFamily::Hahn { .. } => "hahn-polynomial".into(),
                PolyFamily::Krawtchouk { .. } => "krawtchouk-polynomial".into(),
                PolyFamily::Meixner { .. } => "meixner".into(),
                PolyFamily::Charlier { .. } => "charlier".into(),
                PolyFamily::Oscillator { .. } => "oscillator".into(),
                PolyFamily::GaugedOscillator { .. } => "gauged-oscillator".into(),
            },
        }
    }

    fn report(&self) -> RelationReport {
        RelationReport { family: self.family_name(), bounded_degree: self.degree(), checks: Vec::new() }
    }

    /// Records a check of `expr` against the expectation.
    fn check<T: Operator>(&self, relation: &str, indices: &[usize], expr: &T, expect_zero: bool) -> RelationCheck {
        let mut witness = expr.nonzero_witness(self.degree().unwrap_or(0));
        if let (Realized::Lattice(ops), Some(Witness::Matrix { row, point, .. })) = (self, witness.as_mut()) {
            *point = Some(ops.domain().points()[*row].0.clone());
        }
        RelationCheck {
            relation: relation.into(),
            indices: indices.to_vec(),
            expect_zero,
            is_zero: witness.is_none(),
            witness,
        }
    }

    /// Runs `f` with an `L_{i,j}` accessor in the native representation.
    fn with_ops<R>(
        &self,
        f_lat: impl FnOnce(&dyn Fn(usize, usize) -> SparseMatrix) -> Result<R>,
        f_poly: impl FnOnce(&dyn Fn(usize, usize) -> PolyOperator) -> Result<R>,
    ) -> Result<R> {
        match self {
            Realized::Lattice(ops) => f_lat(&|i, j| ops.lu(i, j).clone()),
            Realized::Poly(fam, _) => {
                let d1 = fam.d() + 1;
                let mut table = vec![vec![None; d1 + 1]; d1 + 1];
                for (i, row) in table.iter_mut().enumerate().skip(1) {
                    for (j, slot) in row.iter_mut().enumerate().skip(1) {
                        if i != j {
                            *slot = fam.l(i, j).ok();
                        }
                    }
                }
                f_poly(&|i, j| table[i][j].clone().expect("pair supported by family"))
            }
        }
    }
}

// ---- relation bodies, generic over the representation -----------------

/// `[L_ij, L_kl]` for disjoint pairs.
fn disjoint_commutator<T: Operator>(l: &dyn Fn(usize, usize) -> T, i: usize, j: usize, k: usize, m: usize) -> T {
    l(i, j).commutator(&l(k, m))
}

/// `[L_ij, L_ik + L_jk]`.
fn triangle_commutator<T: Operator>(l: &dyn Fn(usize, usize) -> T, i: usize, j: usize, k: usize) -> T {
    l(i, j).commutator(&l(i, k).plus(&l(j, k)))
}

/// Left side minus right side of the four-index Hahn relation.
fn hahn_four_index<T: Operator>(l: &dyn Fn(usize, usize) -> T, ell: &[Rational], i: usize, j: usize, k: usize, m: usize) -> T {
    let e = |t: usize| ell[t - 1].clone();
    let (li, lj, lk, lm) = (e(i), e(j), e(k), e(m));
    let two = rat(2);
    let (ij, ik, im, jk, jm, km) = (l(i, j), l(i, k), l(i, m), l(j, k), l(j, m), l(k, m));
    let lhs = ij.scaled(&(&lk * (&two + &lk) * &lm * (&two + &lm)));
    let jk_km = jk.commutator(&km);
    let ik_km = ik.commutator(&km);
    let rhs = jk_km
        .anticommutator(&ik_km)
        .minus(&km.anticommutator(&ik.commutator(&jk_km)))
        .minus(&km.anticommutator(&ik.compose(&jm)).scaled(&two))
        .plus(&ik.commutator(&km.commutator(&jm)).scaled(&(&lk * &lm)))
        .plus(&ik.anticommutator(&km).scaled(&(&lj * &lm)))
        .minus(&ik.anticommutator(&jk).scaled(&(&lm * (&lm + &two))))
        .minus(&im.anticommutator(&jm).scaled(&(&lk * (&lk + &two))))
        .plus(&jm.anticommutator(&km).scaled(&(&li * &lk)))
        .minus(&jk.compose(&im).scaled(&rat(4)))
        .plus(&ik.compose(&jm).scaled(&(&two * (rat(-2) + &lk * &lm))))
        .plus(&ik.scaled(&(&two * &lj * (rat(1) + &lk) * &lm)))
        .plus(&im.scaled(&(&lj * &lk * (&two + &two * &lm + &lk * &lm))))
        .plus(&jk.scaled(&(&li * &lm * (&two + &two * &lk + &lk * &lm))))
        .plus(&jm.scaled(&(&two * &li * &lk * (rat(1) + &lm))))
        .minus(&km.scaled(&(&li * &lj * &lk * &lm)));
    lhs.minus(&rhs)
}

/// `p_k p_m L_ij - [L_ik,[L_km,L_jm]] - p_j p_k L_im - p_i p_m L_jk + p_i p_j L_km`
/// (`second` uses `[L_jk, L_km]` as the inner commutator instead).
fn krawtchouk_four_index<T: Operator>(
    l: &dyn Fn(usize, usize) -> T,
    p: &[Rational],
    (i, j, k, m): (usize, usize, usize, usize),
    second: bool,
) -> T {
    let q = |t: usize| p[t - 1].clone();
    let nested = if second {
        l(i, k).commutator(&l(j, k).commutator(&l(k, m)))
    } else {
        l(i, k).commutator(&l(k, m).commutator(&l(j, m)))
    };
    let rhs = nested
        .plus(&l(i, m).scaled(&(q(j) * q(k))))
        .plus(&l(j, k).scaled(&(q(i) * q(m))))
        .minus(&l(k, m).scaled(&(q(i) * q(j))));
    l(i, j).scaled(&(q(k) * q(m))).minus(&rhs)
}

fn distinct(ix: &[usize]) -> bool {
    ix.iter().enumerate().all(|(a, x)| ix[a + 1..].iter().all(|y| y != x))
}

fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=n).filter(|x| !t.contains(x)).map(|x| [t.clone(), vec![x]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn kohno_drinfeld_checks<T: Operator>(r: &Realized, l: &dyn Fn(usize, usize) -> T, ids: &[usize]) -> Vec<RelationCheck> {
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> = ids.iter().flat_map(|&a| ids.iter().filter(move |&&b| b > a).map(move |&b| (a, b))).collect();
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for &(k, m) in &pairs[x + 1..] {
            if distinct(&[i, j, k, m]) {
                out.push(r.check("disjoint-commute", &[i, j, k, m], &disjoint_commutator(l, i, j, k, m), true));
            }
        }
        for &k in ids {
            if k != i && k != j {
                out.push(r.check("triangle", &[i, j, k], &triangle_commutator(l, i, j, k), true));
            }
        }
    }
    out
}

fn full_commutes_checks<T: Operator>(r: &Realized, l: &dyn Fn(usize, usize) -> T, full: &T, pairs: &[(usize, usize)]) -> Vec<RelationCheck> {
    pairs
        .iter()
        .map(|&(i, j)| r.check("full-commutes", &[i, j], &full.commutator(&l(i, j)), true))
        .collect()
}

fn all_pairs(d1: usize) -> Vec<(usize, usize)> {
    (1..=d1).flat_map(|i| (i + 1..=d1).map(move |j| (i, j))).collect()
}

/// Hopping families: all relations over `1..=d+1`; Charlier and oscillator
/// families: the relations within `1..=d`, the commuting boundary terms,
/// `[L_ij, L_{i,d+1} + L_{j,d+1}] = 0`, the non-relation
/// `[L_{i,d+1}, L_ij + L_{j,d+1}] != 0`, and commutation with the
/// Hamiltonian `sum_i L_{i,d+1}`.
pub fn verify_kohno_drinfeld(family: &OperatorFamily, degree: u32) -> Result<RelationReport> {
    let r = family.realize(degree)?;
    kohno_drinfeld_realized(&r)
}

pub fn kohno_drinfeld_realized(r: &Realized) -> Result<RelationReport> {
    let d = r.d();
    let d1 = d + 1;
    let mut rep = r.report();
    let boundary_family = r.has_boundary_pairs();
    let full_ids: Vec<usize> = (1..=d1).collect();
    let inner_ids: Vec<usize> = (1..=d).collect();
    fn body<T: Operator>(r: &Realized, l: &dyn Fn(usize, usize) -> T, boundary: bool, full_ids: &[usize], inner_ids: &[usize]) -> Vec<RelationCheck> {
        let d1 = full_ids.len();
        let mut out;
        let mut h = l(1, d1);
        if boundary {
            out = kohno_drinfeld_checks(r, l, inner_ids);
            for i in 2..d1 {
                h = h.plus(&l(i, d1));
            }
            for &i in inner_ids {
                for &j in inner_ids {
                    if i < j {
                        out.push(r.check("boundary-commute", &[i, j, d1], &l(i, d1).commutator(&l(j, d1)), true));
                        out.push(r.check("pair-with-boundary-sum", &[i, j, d1], &l(i, j).commutator(&l(i, d1).plus(&l(j, d1))), true));
                    }
                    if i != j {
                        let expr = l(i, d1).commutator(&l(i, j).plus(&l(j, d1)));
                        out.push(r.check("boundary-triangle-fails", &[i, j, d1], &expr, false));
                    }
                }
            }
        } else {
            out = kohno_drinfeld_checks(r, l, full_ids);
            h = l(1, 2);
            for (i, j) in all_pairs(d1).into_iter().skip(1) {
                h = h.plus(&l(i, j));
            }
        }
        out.extend(full_commutes_checks(r, l, &h, &all_pairs(d1)));
        out
    }
    rep.checks = r.with_ops(
        |l| Ok(body(r, l, boundary_family, &full_ids, &inner_ids)),
        |l| Ok(body(r, l, boundary_family, &full_ids, &inner_ids)),
    )?;
    Ok(rep)
}

/// The four-index relation of the family at `(i, j, k, m)`.
///
/// Hahn: the anticommutator relation with `l`-dependent coefficients.
/// Krawtchouk and Meixner: both nested-commutator forms. Charlier: the
/// three-index relation with `m = d+1`. Oscillator: the relations for `L`
/// and for `D`, plus the first-order symmetries; the gauged family checks
/// the hatted analogues.
pub fn verify_generator_relation(family: &OperatorFamily, ix: [usize; 4], degree: u32) -> Result<RelationReport> {
    let r = family.realize(degree)?;
    generator_relation_realized(&r, ix)
}

pub fn generator_relation_realized(r: &Realized, ix: [usize; 4]) -> Result<RelationReport> {
    let d1 = r.d() + 1;
    if d1 < 4 {
        return Err(Error::NeedsDimension { needed: 4, got: d1 });
    }
    let [i, j, k, m] = ix;
    if !distinct(&ix) || ix.iter().any(|&t| t == 0 || t > d1) {
        return Err(Error::OutOfRange(format!("indices {ix:?} must be distinct in 1..={d1}")));
    }
    let mut rep = r.report();
    match r {
        Realized::Lattice(ops) => {
            let params = ops.params().to_vec();
            let l = |a: usize, b: usize| ops.lu(a, b).clone();
            match ops.family() {
                LatticeFamily::Hahn(_) => {
                    rep.checks.push(r.check("four-index", &ix, &hahn_four_index(&l, &params, i, j, k, m), true));
                }
                LatticeFamily::Krawtchouk { .. } => {
                    rep.checks.push(r.check("nested-commutator", &ix, &krawtchouk_four_index(&l, &params, (i, j, k, m), false), true));
                    rep.checks.push(r.check("nested-commutator-alt", &ix, &krawtchouk_four_index(&l, &params, (i, j, k, m), true), true));
                }
            }
        }
        Realized::Poly(fam, _) => match fam {
            PolyFamily::Hahn { ell, .. } => {
                let l = |a: usize, b: usize| fam.l(a, b).expect("valid pair");
                rep.checks.push(r.check("four-index", &ix, &hahn_four_index(&l, ell, i, j, k, m), true));
            }
            PolyFamily::Krawtchouk { .. } | PolyFamily::Meixner { .. } => {
                let p = hopping_params(fam);
                let l = |a: usize, b: usize| fam.l(a, b).expect("valid pair");
                rep.checks.push(r.check("nested-commutator", &ix, &krawtchouk_four_index(&l, &p, (i, j, k, m), false), true));
                rep.checks.push(r.check("nested-commutator-alt", &ix, &krawtchouk_four_index(&l, &p, (i, j, k, m), true), true));
            }
            PolyFamily::Charlier { a } => {
                if m != d1 {
                    return Err(Error::UnsupportedPair(k, m));
                }
                let l = |x: usize, y: usize| fam.l(x, y).expect("valid pair");
                let q = |t: usize| a[t - 1].clone();
                // a_k L_ij = [L_ik,[L_jk,L_{k,d+1}]] + a_j a_k L_{i,d+1} + a_i L_jk - a_i a_j L_{k,d+1}
                let rhs = l(i, k)
                    .commutator(&l(j, k).commutator(&l(k, m)))
                    .plus(&l(i, m).scaled(&(q(j) * q(k))))
                    .plus(&l(j, k).scaled(&q(i)))
                    .minus(&l(k, m).scaled(&(q(i) * q(j))));
                rep.checks.push(r.check("nested-commutator", &ix, &l(i, j).scaled(&q(k)).minus(&rhs), true));
            }
            PolyFamily::Oscillator { .. } | PolyFamily::GaugedOscillator { .. } => {
                if m != d1 {
                    return Err(Error::UnsupportedPair(k, m));
                }
                let l = |x: usize, y: usize| fam.l(x, y).expect("valid pair");
                let dd = |x: usize, y: usize| fam.dij(x, y).expect("valid pair");
                // L_ij = [L_ik,[L_jk,L_k]] + L_i + L_jk - L_k, with L_t = L_{t,d+1}
                let rhs = l(i, k)
                    .commutator(&l(j, k).commutator(&l(k, m)))
                    .plus(&l(i, m))
                    .plus(&l(j, k))
                    .minus(&l(k, m));
                rep.checks.push(r.check("nested-commutator", &ix, &l(i, j).minus(&rhs), true));
                let rhs_d = dd(i, k).commutator(&dd(j, k).commutator(&l(k, m)));
                rep.checks.push(r.check("nested-commutator-reduced", &ix, &dd(i, j).minus(&rhs_d), true));
                let rhs_l = dd(i, j).plus(&l(i, m)).plus(&l(j, m));
                rep.checks.push(r.check("pair-decomposition", &[i, j], &l(i, j).minus(&rhs_l), true));
                if matches!(fam, PolyFamily::Oscillator { .. }) {
                    let rot = rotation(fam.d(), i, j);
                    rep.checks.push(r.check("first-order-symmetry", &[i, j], &l(i, j).commutator(&l(i, m)).minus(&rot), true));
                    rep.checks.push(r.check("first-order-symmetry-reduced", &[i, j], &dd(i, j).commutator(&l(i, m)).minus(&rot), true));
                } else {
                    let sum = l(i, j).commutator(&l(i, m)).minus(&dd(i, j).commutator(&l(i, m)));
                    rep.checks.push(r.check("first-order-symmetry-reduced", &[i, j], &sum, true));
                }
            }
        },
    }
    Ok(rep)
}

fn hopping_params(fam: &PolyFamily) -> Vec<Rational> {
    match fam {
        PolyFamily::Krawtchouk { p, .. } => {
            let mut v = p.clone();
            v.push(rat(1) - p.iter().sum::<Rational>());
            v
        }
        PolyFamily::Meixner { c, .. } => {
            let rest = rat(1) - c.iter().sum::<Rational>();
            let mut v: Vec<Rational> = c.iter().map(|ci| -ci.clone() / &rest).collect();
            v.push(rest.recip());
            v
        }
        _ => Vec::new(),
    }
}

/// `z_i ∂_j - z_j ∂_i`.
fn rotation(d: usize, i: usize, j: usize) -> PolyOperator {
    let mut b = TermBuilder::new(d);
    let der = |t: usize| {
        let mut a = vec![0u32; d];
        a[t - 1] = 1;
        Action::Derivative(a)
    };
    b.add(&Poly::var(d, i - 1), der(j));
    b.add(&Poly::var(d, j - 1).scale(&rat(-1)), der(i));
    b.build()
}

/// Every ordered index tuple the family's relation is stated for: all
/// 4-tuples of distinct indices for hopping families, `(i, j, k, d+1)` with
/// distinct `i, j, k <= d` for the Charlier and oscillator families.
pub fn relation_tuples(family_d: usize, boundary: bool) -> Vec<[usize; 4]> {
    let d1 = family_d + 1;
    if boundary {
        ordered_tuples(family_d, 3).into_iter().map(|t| [t[0], t[1], t[2], d1]).collect()
    } else {
        ordered_tuples(d1, 4).into_iter().map(|t| [t[0], t[1], t[2], t[3]]).collect()
    }
}

pub fn verify_generator_relations_all(family: &OperatorFamily, degree: u32) -> Result<RelationReport> {
    let r = family.realize(degree)?;
    let boundary = r.has_boundary_pairs();
    let d1 = r.d() + 1;
    if d1 < 4 {
        return Err(Error::NeedsDimension { needed: 4, got: d1 });
    }
    let mut rep = r.report();
    for t in relation_tuples(r.d(), boundary) {
        rep.extend(generator_relation_realized(&r, t)?);
    }
    Ok(rep)
}

/// Reconstruction of every `L_{i,j}`, `1 < i < j < d+1`, from the generating
/// set `{L_{1,j}} ∪ {L_{i,d+1}}`, and both Gaudin-sum reconstructions with
/// the cyclically relabeled partial sums `M^±`.
pub fn verify_generating_sets(spec: &DomainSpec) -> Result<RelationReport> {
    let d = spec.d();
    if d < 3 {
        return Err(Error::NeedsDimension { needed: 3, got: d });
    }
    let ops = LatticeOperators::hahn(spec)?;
    generating_sets_lattice(&ops)
}

pub fn generating_sets_lattice(ops: &LatticeOperators) -> Result<RelationReport> {
    let d = ops.d();
    let d1 = d + 1;
    if d < 3 {
        return Err(Error::NeedsDimension { needed: 3, got: d });
    }
    let r = Realized::Lattice(ops.clone());
    let mut rep = r.report();
    let ell = ops.params().to_vec();
    let l = |a: usize, b: usize| ops.lu(a, b).clone();
    for i in 2..d1 {
        for j in i + 1..d1 {
            // apply the four-index relation at (i, j, 1, d+1) and solve for L_ij
            let (lk, lm) = (&ell[0], &ell[d]);
            let lead = lk * (rat(2) + lk) * lm * (rat(2) + lm);
            let without_lij = hahn_four_index(&l, &ell, i, j, 1, d1).minus(&l(i, j).scaled(&lead));
            let rebuilt = without_lij.scaled(&(-lead.recip()));
            rep.checks.push(r.check("generated-from-set", &[i, j], &rebuilt.minus(&l(i, j)), true));
        }
    }
    // M_j for j >= d+1 vanishes
    let m = |k: usize| ops.m(k);
    let plus = |k: usize| ops.relabeled_m(k, |t| if t == d1 { 1 } else { t + 1 });
    let minus = |k: usize| ops.relabeled_m(k, |t| if t == 1 { d1 } else { t - 1 });
    for j in 2..=d1 {
        let rebuilt = plus(j - 1).minus(&m(j)).minus(&plus(j).minus(&m(j + 1)));
        rep.checks.push(r.check("gaudin-forward", &[1, j], &rebuilt.minus(&l(1, j)), true));
    }
    for i in 1..=d {
        let rebuilt = m(i).minus(&minus(i + 1)).minus(&m(i + 1).minus(&minus(i + 2)));
        rep.checks.push(r.check("gaudin-backward", &[i, d1], &rebuilt.minus(&l(i, d1)), true));
    }
    Ok(rep)
}

/// `W L_ij = L_ijᵀ W` for every pair, `W` the diagonal weight.
pub fn verify_self_adjoint(ops: &LatticeOperators) -> Result<RelationReport> {
    let w = ops.weights()?;
    let r = Realized::Lattice(ops.clone());
    let mut rep = r.report();
    for (i, j) in all_pairs(ops.d() + 1) {
        let l = ops.lu(i, j);
        let expr = l.left_diag(&w).sub(&l.transpose().right_diag(&w));
        rep.checks.push(r.check("self-adjoint", &[i, j], &expr, true));
    }
    Ok(rep)
}

/// The full Meixner operator equals the sum of its substituted pair
/// operators; each pair operator preserves degree.
pub fn verify_meixner_decomposition(s: &Rational, c: &[Rational], degree: u32) -> Result<RelationReport> {
    let fam = checked(PolyFamily::Meixner { s: s.clone(), c: c.to_vec() })?;
    let r = Realized::Poly(fam.clone(), degree);
    let mut rep = r.report();
    let expr = fam.full()?.minus(&meixner_expanded(s, c)?);
    rep.checks.push(r.check("decomposition", &[], &expr, true));
    rep.extend(degree_preservation_realized(&r)?);
    Ok(rep)
}

/// The Charlier Hamiltonian equals `sum_i L_{i,d+1}`.
pub fn verify_charlier_decomposition(a: &[Rational], degree: u32) -> Result<RelationReport> {
    let fam = checked(PolyFamily::Charlier { a: a.to_vec() })?;
    let r = Realized::Poly(fam.clone(), degree);
    let mut rep = r.report();
    let expr = fam.full()?.minus(&charlier_expanded(a)?);
    rep.checks.push(r.check("decomposition", &[], &expr, true));
    Ok(rep)
}

/// Both rescaled Charlier forms against the originals, for equal
/// parameters `a` with `2a` a rational square.
pub fn verify_rescaled_charlier(d: usize, a: &Rational, degree: u32) -> Result<RelationReport> {
    let rc = RescaledCharlier::new(d, a.clone())?;
    let r = Realized::Poly(PolyFamily::Charlier { a: vec![a.clone(); d] }, degree);
    let mut rep = r.report();
    rep.family = "charlier-rescaled".into();
    for i in 1..=d {
        let expr = rc.direct_boundary(i).minus(&rc.rescaled_boundary(i));
        rep.checks.push(r.check("rescaled-boundary", &[i, d + 1], &expr, true));
        for j in i + 1..=d {
            let expr = rc.direct_pair_over_a(i, j).minus(&rc.rescaled_pair_over_a(i, j));
            rep.checks.push(r.check("rescaled-pair", &[i, j], &expr, true));
        }
    }
    Ok(rep)
}

/// Every pair operator maps polynomials of degree `n` to degree `<= n`
/// (`<= n + 2` for the gauged oscillator).
pub fn verify_degree_preservation(family: &PolyFamily, degree: u32) -> Result<RelationReport> {
    family.validate()?;
    degree_preservation_realized(&Realized::Poly(family.clone(), degree))
}

fn degree_preservation_realized(r: &Realized) -> Result<RelationReport> {
    let Realized::Poly(fam, degree) = r else {
        return Err(Error::RepresentationMismatch);
    };
    let allowed = if matches!(fam, PolyFamily::GaugedOscillator { .. }) { 2 } else { 0 };
    let mut rep = r.report();
    for (i, j) in all_pairs(fam.d() + 1) {
        let op = fam.l(i, j)?;
        let rise = op.max_degree_increase(*degree).unwrap_or(i64::MIN);
        let ok = rise <= allowed;
        rep.checks.push(RelationCheck {
            relation: format!("degree-rise<={allowed}"),
            indices: vec![i, j],
            expect_zero: true,
            is_zero: ok,
            witness: (!ok).then(|| Witness::Monomial { exponent: Vec::new(), image: format!("degree rise {rise}") }),
        });
    }
    Ok(rep)
}

/// Sparse triplet CSV: a `# {json}` header line, then `row,col,value`.
pub fn export_triplets(m: &SparseMatrix, header: &serde_json::Value) -> String {
    let mut out = format!("# {header}\nrow,col,value\n");
    for (r, c, v) in m.triplets() {
        out.push_str(&format!("{r},{c},{v}\n"));
    }
    out
}

/// Parses the output of [`export_triplets`] back into `(header, matrix)`.
pub fn import_triplets(text: &str, dim: usize) -> Result<(serde_json::Value, SparseMatrix)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| Error::Config("missing header line".into()))?;
    let header: serde_json::Value = serde_json::from_str(header).map_err(|e| Error::Config(e.to_string()))?;
    if lines.next() != Some("row,col,value") {
        return Err(Error::Config("missing column line".into()));
    }
    let mut m = SparseMatrix::zeros(dim);
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(Error::Config(format!("bad triplet line {line:?}")));
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|e| Error::Config(e.to_string()));
        let (r, c) = (parse(f[0])?, parse(f[1])?);
        if r >= dim || c >= dim {
            return Err(Error::Config(format!("triplet ({r},{c}) outside dimension {dim}")));
        }
        m.add_entry(r, c, crate::exact::parse_rational(f[2])?);
    }
    Ok((header, m))
}

/// Convenience for Krawtchouk lattice families with validated parameters.
pub fn krawtchouk_family(p: &[Rational], n: u32) -> Result<OperatorFamily> {
    FamilyParams::Krawtchouk { p: p.to_vec(), n }.validate()?;
    Ok(OperatorFamily::Krawtchouk { p: p.to_vec(), n })
}
