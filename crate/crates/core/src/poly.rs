//! Sparse multivariate polynomials with rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{binomial, rat, Rational};

/// Exponent vector, one entry per variable.
pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    pub fn monomial(exp: Exponent, c: Rational) -> Self {
        let mut p = Poly::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// The coordinate function `z_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exp: Exponent, c: Rational) {
        debug_assert_eq!(exp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (z, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(z.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_int(&self, point: &[i64]) -> Rational {
        let pt: Vec<Rational> = point.iter().map(|&v| rat(v)).collect();
        self.eval(&pt)
    }

    /// `f(z + s)`.
    pub fn shift(&self, s: &[Rational]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            // expand prod_i (z_i + s_i)^{e_i}
            let mut acc = Poly::constant(self.nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut factor = Poly::zero(self.nvars);
                for r in 0..=k {
                    let b = Rational::from_integer(binomial(k as i64, r as u64).unwrap_or_else(|_| BigInt::zero()));
                    let sp = num_traits::pow(s[i].clone(), (k - r) as usize);
                    let mut ex = vec![0; self.nvars];
                    ex[i] = r;
                    factor.add_term(ex, b * sp);
                }
                acc = acc.mul(&factor);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Mixed partial derivative `d^alpha f`.
    pub fn derivative(&self, alpha: &[u32]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        'terms: for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut ne = e.clone();
            for (i, &a) in alpha.iter().enumerate() {
                if a > e[i] {
                    continue 'terms;
                }
                for t in 0..a {
                    coef *= rat((e[i] - t) as i64);
                }
                ne[i] = e[i] - a;
            }
            out.add_term(ne, coef);
        }
        out
    }

    /// All monomials `z^alpha` with `|alpha| <= degree`, graded order.
    pub fn monomials_up_to(nvars: usize, degree: u32) -> Vec<Exponent> {
        let mut out = Vec::new();
        for total in 0..=degree {
            let mut cur = vec![0u32; nvars];
            fill(&mut out, &mut cur, 0, total);
        }
        out
    }
}

fn fill(out: &mut Vec<Exponent>, cur: &mut Exponent, i: usize, left: u32) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == n - 1 {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for v in (0..=left).rev() {
        cur[i] = v;
        fill(out, cur, i + 1, left - v);
    }
    cur[i] = 0;
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*z{}", i + 1)?,
                    _ => write!(f, "*z{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn shift_matches_evaluation() {
        // f = z1^2 z2 - 3 z2 + 1/2
        let mut f = Poly::zero(2);
        f.add_term(vec![2, 1], rat(1));
        f.add_term(vec![0, 1], rat(-3));
        f.add_term(vec![0, 0], ratio(1, 2));
        let s = [ratio(1, 3), rat(-2)];
        let g = f.shift(&s);
        for (a, b) in [(0i64, 0i64), (1, 2), (-3, 5)] {
            let pt = [rat(a), rat(b)];
            let shifted = [rat(a) + &s[0], rat(b) + &s[1]];
            assert_eq!(g.eval(&pt), f.eval(&shifted));
        }
    }

    #[test]
    fn derivative_and_degree() {
        let mut f = Poly::zero(2);
        f.add_term(vec![3, 2], rat(2));
        f.add_term(vec![1, 0], rat(5));
        let g = f.derivative(&[1, 1]);
        assert_eq!(g, Poly::monomial(vec![2, 1], rat(12)));
        assert_eq!(f.degree(), Some(5));
        assert_eq!(Poly::zero(2).degree(), None);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(2, 0);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn monomial_enumeration_counts() {
        // binom(D + n, n)
        assert_eq!(Poly::monomials_up_to(3, 6).len(), 84);
        assert_eq!(Poly::monomials_up_to(2, 0), vec![vec![0, 0]]);
    }
}
