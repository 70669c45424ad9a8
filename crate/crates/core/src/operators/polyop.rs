//! Operators with polynomial coefficients acting on the polynomial ring.
//!
//! Identities between such operators are verified by applying both sides to
//! every monomial up to a fixed total degree; equality is therefore bounded
//! verification, never a proof for all degrees.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::exact::{rat, Rational};
use crate::poly::{Exponent, Poly};

/// Elementary action: `f(z) -> f(z + s)` or `f -> d^alpha f`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Shift(Vec<Rational>),
    Derivative(Vec<u32>),
}

impl Action {
    pub fn identity(nvars: usize) -> Action {
        Action::Derivative(vec![0; nvars])
    }

    fn apply(&self, f: &Poly) -> Poly {
        match self {
            Action::Shift(s) if s.iter().all(|v| v.is_zero()) => f.clone(),
            Action::Shift(s) => f.shift(s),
            Action::Derivative(a) if a.iter().all(|&v| v == 0) => f.clone(),
            Action::Derivative(a) => f.derivative(a),
        }
    }
}

#[derive(Debug)]
enum Node {
    Terms(Vec<(Poly, Action)>),
    Sum(Vec<(Rational, PolyOperator)>),
    Product(PolyOperator, PolyOperator),
}

/// Expression tree over primitive `sum_t c_t(z) A_t` nodes; sharing is cheap.
#[derive(Clone, Debug)]
pub struct PolyOperator {
    nvars: usize,
    node: Arc<Node>,
}

/// Accumulates `coefficient * action` pairs, merging equal actions.
#[derive(Clone, Debug)]
pub struct TermBuilder {
    nvars: usize,
    terms: BTreeMap<Action, Poly>,
}

impl TermBuilder {
    pub fn new(nvars: usize) -> Self {
        TermBuilder { nvars, terms: BTreeMap::new() }
    }

    pub fn add(&mut self, coef: &Poly, action: Action) -> &mut Self {
        let e = self.terms.entry(action).or_insert_with(|| Poly::zero(self.nvars));
        *e = e.add(coef);
        self
    }

    /// Adds `coef * (sum_s w_s E^s)` for a list of weighted shifts.
    pub fn add_shifts(&mut self, coef: &Poly, shifts: &[(Rational, Vec<Rational>)]) -> &mut Self {
        for (w, s) in shifts {
            self.add(&coef.scale(w), Action::Shift(s.clone()));
        }
        self
    }

    pub fn build(&self) -> PolyOperator {
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| (c.clone(), a.clone()))
            .collect();
        PolyOperator { nvars: self.nvars, node: Arc::new(Node::Terms(terms)) }
    }
}

impl PolyOperator {
    pub fn zero(nvars: usize) -> Self {
        PolyOperator { nvars, node: Arc::new(Node::Terms(Vec::new())) }
    }

    pub fn identity(nvars: usize) -> Self {
        PolyOperator { nvars, node: Arc::new(Node::Terms(vec![(Poly::one(nvars), Action::identity(nvars))])) }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        match &*self.node {
            Node::Terms(ts) => {
                let mut out = Poly::zero(self.nvars);
                for (c, a) in ts {
                    out = out.add(&c.mul(&a.apply(f)));
                }
                out
            }
            Node::Sum(parts) => {
                let mut out = Poly::zero(self.nvars);
                for (w, op) in parts {
                    out = out.add(&op.apply(f).scale(w));
                }
                out
            }
            Node::Product(a, b) => a.apply(&b.apply(f)),
        }
    }

    fn combine(&self, other: &PolyOperator, w: Rational) -> PolyOperator {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        PolyOperator {
            nvars: self.nvars,
            node: Arc::new(Node::Sum(vec![(Rational::one(), self.clone()), (w, other.clone())])),
        }
    }

    pub fn plus(&self, other: &PolyOperator) -> PolyOperator {
        self.combine(other, Rational::one())
    }

    pub fn minus(&self, other: &PolyOperator) -> PolyOperator {
        self.combine(other, -Rational::one())
    }

    pub fn scaled(&self, c: &Rational) -> PolyOperator {
        PolyOperator { nvars: self.nvars, node: Arc::new(Node::Sum(vec![(c.clone(), self.clone())])) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PolyOperator) -> PolyOperator {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        PolyOperator { nvars: self.nvars, node: Arc::new(Node::Product(self.clone(), other.clone())) }
    }

    pub fn commutator(&self, other: &PolyOperator) -> PolyOperator {
        self.compose(other).minus(&other.compose(self))
    }

    pub fn anticommutator(&self, other: &PolyOperator) -> PolyOperator {
        self.compose(other).plus(&other.compose(self))
    }

    /// First monomial of degree `<= degree` not annihilated, with its image.
    pub fn find_nonzero(&self, degree: u32) -> Option<(Exponent, Poly)> {
        Poly::monomials_up_to(self.nvars, degree).into_iter().find_map(|e| {
            let img = self.apply(&Poly::monomial(e.clone(), rat(1)));
            (!img.is_zero()).then_some((e, img))
        })
    }

    /// Largest `deg(L m) - deg(m)` over monomials `m` of degree `<= degree`
    /// (`None` when every image vanishes).
    pub fn max_degree_increase(&self, degree: u32) -> Option<i64> {
        Poly::monomials_up_to(self.nvars, degree)
            .into_iter()
            .filter_map(|e| {
                let n: u32 = e.iter().sum();
                self.apply(&Poly::monomial(e, rat(1))).degree().map(|dg| dg as i64 - n as i64)
            })
            .max()
    }
}

/// Unit vector scaled by `h` in coordinate `i` (0-based).
pub(crate) fn unit(nvars: usize, i: usize, h: &Rational) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); nvars];
    v[i] = h.clone();
    v
}

fn add_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Forward difference `Δ_i = E_i - 1` with step `h`, as weighted shifts.
pub(crate) fn forward(nvars: usize, i: usize, h: &Rational) -> Vec<(Rational, Vec<Rational>)> {
    vec![(rat(1), unit(nvars, i, h)), (rat(-1), vec![Rational::zero(); nvars])]
}

/// Backward difference `∇_i = 1 - E_i^{-1}`.
pub(crate) fn backward(nvars: usize, i: usize, h: &Rational) -> Vec<(Rational, Vec<Rational>)> {
    vec![(rat(1), vec![Rational::zero(); nvars]), (rat(-1), unit(nvars, i, &-h.clone()))]
}

/// Product of two commuting shift combinations.
pub(crate) fn shift_product(
    a: &[(Rational, Vec<Rational>)],
    b: &[(Rational, Vec<Rational>)],
) -> Vec<(Rational, Vec<Rational>)> {
    let mut out = Vec::new();
    for (wa, sa) in a {
        for (wb, sb) in b {
            out.push((wa * wb, add_vec(sa, sb)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_and_derivative_actions() {
        let x = Poly::var(1, 0);
        let mut b = TermBuilder::new(1);
        b.add_shifts(&Poly::one(1), &forward(1, 0, &rat(1)));
        let delta = b.build();
        // Δ x^2 = 2x + 1
        let sq = x.mul(&x);
        assert_eq!(delta.apply(&sq), x.scale(&rat(2)).add(&Poly::one(1)));
        let mut b = TermBuilder::new(1);
        b.add(&Poly::one(1), Action::Derivative(vec![1]));
        let dz = b.build();
        assert_eq!(dz.apply(&sq), x.scale(&rat(2)));
        // [d/dz, z] = 1
        let mut b = TermBuilder::new(1);
        b.add(&x, Action::identity(1));
        let mult_z = b.build();
        let c = dz.commutator(&mult_z);
        assert!(c.minus(&PolyOperator::identity(1)).find_nonzero(6).is_none());
        assert!(c.anticommutator(&c).minus(&PolyOperator::identity(1).scaled(&rat(2))).find_nonzero(4).is_none());
        assert_eq!(dz.max_degree_increase(5), Some(-1));
    }

    #[test]
    fn merged_terms_cancel() {
        let mut b = TermBuilder::new(2);
        b.add(&Poly::var(2, 0), Action::Shift(vec![rat(1), rat(0)]));
        b.add(&Poly::var(2, 0).scale(&rat(-1)), Action::Shift(vec![rat(1), rat(0)]));
        assert!(b.build().find_nonzero(3).is_none());
        let db = shift_product(&forward(2, 0, &rat(1)), &backward(2, 1, &rat(1)));
        assert_eq!(db.len(), 4);
    }
}
