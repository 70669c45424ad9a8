//! Operator families realized on the polynomial ring.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{rat, Rational};
use crate::families::FamilyParams;
use crate::poly::Poly;

use super::polyop::{backward, forward, shift_product, unit, Action, PolyOperator, TermBuilder};

/// Operator families whose identities are checked by their action on
/// polynomials. Indices are 1-based, with `d+1` the homogeneous index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyFamily {
    /// Hahn pair operators with rational `l` and `x_{d+1} = N - |x|`.
    Hahn { ell: Vec<Rational>, n: Rational },
    /// Krawtchouk pair operators with `p_{d+1} = 1 - |p|`, `x_{d+1} = N - |x|`.
    Krawtchouk { p: Vec<Rational>, n: Rational },
    /// Krawtchouk form at `N = -s`, `p_j = -c_j/(1-|c|)`, `p_{d+1} = 1/(1-|c|)`.
    Meixner { s: Rational, c: Vec<Rational> },
    Charlier { a: Vec<Rational> },
    Oscillator { d: usize },
    GaugedOscillator { d: usize },
}

fn affine_hop(d: usize, i: usize, j: usize) -> Vec<Rational> {
    // e_i - e_j with e_{d+1} = 0
    let mut s = vec![Rational::zero(); d];
    if i <= d {
        s[i - 1] += rat(1);
    }
    if j <= d {
        s[j - 1] -= rat(1);
    }
    s
}

fn homogeneous_vars(d: usize, n: &Rational) -> Vec<Poly> {
    let mut xs: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
    let mut last = Poly::constant(d, n.clone());
    for x in &xs {
        last = last.sub(x);
    }
    xs.push(last);
    xs
}

/// `c_ij (E_iE_j^{-1} - 1) + c_ji (E_jE_i^{-1} - 1)`.
fn hopping_pair(d: usize, i: usize, j: usize, c_ij: &Poly, c_ji: &Poly) -> PolyOperator {
    let zero = vec![Rational::zero(); d];
    let mut b = TermBuilder::new(d);
    b.add_shifts(c_ij, &[(rat(1), affine_hop(d, i, j)), (rat(-1), zero.clone())]);
    b.add_shifts(c_ji, &[(rat(1), affine_hop(d, j, i)), (rat(-1), zero)]);
    b.build()
}

fn deriv(d: usize, orders: &[(usize, u32)]) -> Action {
    let mut a = vec![0u32; d];
    for &(i, k) in orders {
        a[i - 1] += k;
    }
    Action::Derivative(a)
}

impl PolyFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            PolyFamily::Hahn { ell, .. } if ell.len() < 2 => {
                Err(Error::ParameterOutOfRange("need at least two entries in l".into()))
            }
            PolyFamily::Krawtchouk { p, .. } if p.is_empty() => {
                Err(Error::ParameterOutOfRange("p must be nonempty".into()))
            }
            PolyFamily::Meixner { s, c } => FamilyParams::Meixner { s: s.clone(), c: c.clone() }.validate(),
            PolyFamily::Charlier { a } => FamilyParams::Charlier { a: a.clone() }.validate(),
            PolyFamily::Oscillator { d } | PolyFamily::GaugedOscillator { d } if *d < 1 => {
                Err(Error::OutOfRange("d must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            PolyFamily::Hahn { ell, .. } => ell.len() - 1,
            PolyFamily::Krawtchouk { p, .. } => p.len(),
            PolyFamily::Meixner { c, .. } => c.len(),
            PolyFamily::Charlier { a } => a.len(),
            PolyFamily::Oscillator { d } | PolyFamily::GaugedOscillator { d } => *d,
        }
    }

    /// Krawtchouk-type homogeneous parameters and formal `N`.
    fn hopping_params(&self) -> Option<(Vec<Rational>, Rational)> {
        match self {
            PolyFamily::Krawtchouk { p, n } => {
                let mut v = p.clone();
                v.push(rat(1) - p.iter().sum::<Rational>());
                Some((v, n.clone()))
            }
            PolyFamily::Meixner { s, c } => {
                let rest = rat(1) - c.iter().sum::<Rational>();
                let mut v: Vec<Rational> = c.iter().map(|ci| -ci.clone() / &rest).collect();
                v.push(rest.recip());
                Some((v, -s.clone()))
            }
            _ => None,
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let d1 = self.d() + 1;
        if i == j || i == 0 || j == 0 || i > d1 || j > d1 {
            return Err(Error::UnsupportedPair(i, j));
        }
        Ok(())
    }

    /// `L_{i,j}`.
    pub fn l(&self, i: usize, j: usize) -> Result<PolyOperator> {
        self.check_pair(i, j)?;
        let d = self.d();
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        match self {
            PolyFamily::Hahn { ell, n } => {
                let xs = homogeneous_vars(d, n);
                let c = |a: usize, b: usize| xs[b - 1].mul(&xs[a - 1].sub(&Poly::constant(d, ell[a - 1].clone())));
                Ok(hopping_pair(d, i, j, &c(i, j), &c(j, i)))
            }
            PolyFamily::Krawtchouk { .. } | PolyFamily::Meixner { .. } => {
                let (p, n) = self.hopping_params().expect("hopping family");
                let xs = homogeneous_vars(d, &n);
                let c = |a: usize, b: usize| xs[b - 1].scale(&p[a - 1]);
                Ok(hopping_pair(d, i, j, &c(i, j), &c(j, i)))
            }
            PolyFamily::Charlier { a } => {
                let x = |k: usize| Poly::var(d, k - 1);
                if j == d + 1 {
                    // a_i (E_i - 1) + x_i (E_i^{-1} - 1)
                    let zero = vec![Rational::zero(); d];
                    let mut b = TermBuilder::new(d);
                    b.add_shifts(&Poly::constant(d, a[i - 1].clone()), &[(rat(1), unit(d, i - 1, &rat(1))), (rat(-1), zero.clone())]);
                    b.add_shifts(&x(i), &[(rat(1), unit(d, i - 1, &rat(-1))), (rat(-1), zero)]);
                    Ok(b.build())
                } else {
                    Ok(hopping_pair(d, i, j, &x(j).scale(&a[i - 1]), &x(i).scale(&a[j - 1])))
                }
            }
            PolyFamily::Oscillator { .. } => {
                let one = Poly::one(d);
                let z = |k: usize| Poly::var(d, k - 1);
                let mut b = TermBuilder::new(d);
                if j == d + 1 {
                    b.add(&one.scale(&Rational::new(1.into(), 2.into())), deriv(d, &[(i, 2)]));
                    b.add(&z(i).scale(&rat(-1)), deriv(d, &[(i, 1)]));
                } else {
                    // ½(∂_i - ∂_j)² - (z_i - z_j)(∂_i - ∂_j)
                    let half = Rational::new(1.into(), 2.into());
                    b.add(&one.scale(&half), deriv(d, &[(i, 2)]));
                    b.add(&one.scale(&half), deriv(d, &[(j, 2)]));
                    b.add(&one.scale(&rat(-1)), deriv(d, &[(i, 1), (j, 1)]));
                    let diff = z(i).sub(&z(j));
                    b.add(&diff.scale(&rat(-1)), deriv(d, &[(i, 1)]));
                    b.add(&diff, deriv(d, &[(j, 1)]));
                }
                Ok(b.build())
            }
            PolyFamily::GaugedOscillator { .. } => {
                if j == d + 1 {
                    let z = Poly::var(d, i - 1);
                    let half = Rational::new(1.into(), 2.into());
                    let mut b = TermBuilder::new(d);
                    b.add(&Poly::constant(d, half.clone()), deriv(d, &[(i, 2)]));
                    b.add(&z.mul(&z).scale(&-half.clone()).add(&Poly::constant(d, half)), Action::identity(d));
                    Ok(b.build())
                } else {
                    // gauge is linear: L̂_ij = D̂_ij + L̂_{i,d+1} + L̂_{j,d+1}
                    Ok(self.dij(i, j)?.plus(&self.l(i, d + 1)?).plus(&self.l(j, d + 1)?))
                }
            }
        }
    }

    /// `D_{i,j} = -∂_i∂_j + z_i∂_j + z_j∂_i` (oscillator) or its gauge
    /// transform `-∂_i∂_j + z_i z_j`, for `i != j <= d`.
    pub fn dij(&self, i: usize, j: usize) -> Result<PolyOperator> {
        let d = self.d();
        if i == j || i == 0 || j == 0 || i > d || j > d {
            return Err(Error::UnsupportedPair(i, j));
        }
        let z = |k: usize| Poly::var(d, k - 1);
        let mut b = TermBuilder::new(d);
        b.add(&Poly::constant(d, rat(-1)), deriv(d, &[(i, 1), (j, 1)]));
        match self {
            PolyFamily::Oscillator { .. } => {
                b.add(&z(i), deriv(d, &[(j, 1)]));
                b.add(&z(j), deriv(d, &[(i, 1)]));
            }
            PolyFamily::GaugedOscillator { .. } => {
                b.add(&z(i).mul(&z(j)), Action::identity(d));
            }
            _ => return Err(Error::UnsupportedPair(i, j)),
        }
        Ok(b.build())
    }

    /// Sum of all pair operators the family's Hamiltonian is built from:
    /// every `L_{i,j}` for the hopping families, `sum_i L_{i,d+1}` for the
    /// Charlier and oscillator families.
    pub fn full(&self) -> Result<PolyOperator> {
        let d1 = self.d() + 1;
        let mut acc = PolyOperator::zero(self.d());
        match self {
            PolyFamily::Charlier { .. } | PolyFamily::Oscillator { .. } | PolyFamily::GaugedOscillator { .. } => {
                for i in 1..d1 {
                    acc = acc.plus(&self.l(i, d1)?);
                }
            }
            _ => {
                for i in 1..=d1 {
                    for j in i + 1..=d1 {
                        acc = acc.plus(&self.l(i, j)?);
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// `sum_{i,j} (δ_ij + c_i/(1-|c|)) x_j Δ_i∇_j + sum_i (-x_i + c_i s/(1-|c|)) Δ_i`.
pub fn meixner_expanded(s: &Rational, c: &[Rational]) -> Result<PolyOperator> {
    FamilyParams::Meixner { s: s.clone(), c: c.to_vec() }.validate()?;
    let d = c.len();
    let rest = rat(1) - c.iter().sum::<Rational>();
    let one = rat(1);
    let mut b = TermBuilder::new(d);
    for (i, ci) in c.iter().enumerate() {
        let ci = ci / &rest;
        for j in 0..d {
            let delta = if i == j { rat(1) } else { rat(0) };
            let coef = Poly::var(d, j).scale(&(delta + &ci));
            b.add_shifts(&coef, &shift_product(&forward(d, i, &one), &backward(d, j, &one)));
        }
        let lin = Poly::var(d, i).scale(&rat(-1)).add(&Poly::constant(d, &ci * s));
        b.add_shifts(&lin, &forward(d, i, &one));
    }
    Ok(b.build())
}

/// `sum_j x_j Δ_j∇_j + sum_i (a_i - x_i) Δ_i`.
pub fn charlier_expanded(a: &[Rational]) -> Result<PolyOperator> {
    FamilyParams::Charlier { a: a.to_vec() }.validate()?;
    let d = a.len();
    let one = rat(1);
    let mut b = TermBuilder::new(d);
    for (i, ai) in a.iter().enumerate() {
        b.add_shifts(&Poly::var(d, i), &shift_product(&forward(d, i, &one), &backward(d, i, &one)));
        let lin = Poly::constant(d, ai.clone()).sub(&Poly::var(d, i));
        b.add_shifts(&lin, &forward(d, i, &one));
    }
    Ok(b.build())
}

/// `sqrt(q)` when `q` is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// The Charlier pair operators (equal parameters `a`) written in the
/// variables `z` with `x = a + z/h`, `h = 1/sqrt(2a)`, both directly and in
/// the rescaled difference form; shifts move `z` by `±h`.
#[derive(Clone, Debug)]
pub struct RescaledCharlier {
    pub d: usize,
    pub a: Rational,
    pub h: Rational,
}

impl RescaledCharlier {
    /// Requires `2a` to be a rational square so that `h` is rational.
    pub fn new(d: usize, a: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::ParameterOutOfRange("a must be positive".into()));
        }
        let root = rational_sqrt(&(&a * rat(2)))
            .ok_or_else(|| Error::ParameterOutOfRange(format!("2a = {} is not a rational square", &a * rat(2))))?;
        Ok(RescaledCharlier { d, a, h: root.recip() })
    }

    fn x(&self, i: usize) -> Poly {
        Poly::constant(self.d, self.a.clone()).add(&Poly::var(self.d, i - 1).scale(&self.h.recip()))
    }

    fn delta(&self, i: usize) -> Vec<(Rational, Vec<Rational>)> {
        forward(self.d, i - 1, &self.h)
    }

    fn nabla(&self, i: usize) -> Vec<(Rational, Vec<Rational>)> {
        backward(self.d, i - 1, &self.h)
    }

    /// `a(E_i - 1) + x_i(E_i^{-1} - 1)` with `x_i = a + z_i/h`.
    pub fn direct_boundary(&self, i: usize) -> PolyOperator {
        let d = self.d;
        let zero = vec![Rational::zero(); d];
        let mut b = TermBuilder::new(d);
        b.add_shifts(&Poly::constant(d, self.a.clone()), &[(rat(1), unit(d, i - 1, &self.h)), (rat(-1), zero.clone())]);
        b.add_shifts(&self.x(i), &[(rat(1), unit(d, i - 1, &-self.h.clone())), (rat(-1), zero)]);
        b.build()
    }

    /// `½(1 + 2h z_i)(1/h²) Δ_i∇_i - (z_i/h) Δ_i`.
    pub fn rescaled_boundary(&self, i: usize) -> PolyOperator {
        let d = self.d;
        let inv_h = self.h.recip();
        let half = Rational::new(1.into(), 2.into());
        let lead = Poly::one(d)
            .add(&Poly::var(d, i - 1).scale(&(&self.h * rat(2))))
            .scale(&(half * &inv_h * &inv_h));
        let mut b = TermBuilder::new(d);
        b.add_shifts(&lead, &shift_product(&self.delta(i), &self.nabla(i)));
        b.add_shifts(&Poly::var(d, i - 1).scale(&-inv_h), &self.delta(i));
        b.build()
    }

    /// `(1/a) L_{i,j}` from the direct pair form with `x = a + z/h`.
    pub fn direct_pair_over_a(&self, i: usize, j: usize) -> PolyOperator {
        let d = self.d;
        let s = |p: usize, q: usize| {
            let mut v = vec![Rational::zero(); d];
            v[p - 1] += &self.h;
            v[q - 1] -= &self.h;
            v
        };
        let zero = vec![Rational::zero(); d];
        // a x_j (E_iE_j^{-1} - 1) + a x_i (E_jE_i^{-1} - 1), divided by a
        let mut b = TermBuilder::new(d);
        b.add_shifts(&self.x(j), &[(rat(1), s(i, j)), (rat(-1), zero.clone())]);
        b.add_shifts(&self.x(i), &[(rat(1), s(j, i)), (rat(-1), zero)]);
        b.build()
    }

    /// `a(-Δ_i∇_j - Δ_j∇_i + Δ_i∇_i + Δ_j∇_j) - (1/h)(z_jΔ_i∇_j + z_iΔ_j∇_i)
    ///  + (1/h) z_j (Δ_i - ∇_j) + (1/h) z_i (Δ_j - ∇_i)`.
    pub fn rescaled_pair_over_a(&self, i: usize, j: usize) -> PolyOperator {
        let d = self.d;
        let inv_h = self.h.recip();
        let a = Poly::constant(d, self.a.clone());
        let zi = Poly::var(d, i - 1).scale(&inv_h);
        let zj = Poly::var(d, j - 1).scale(&inv_h);
        let neg = |v: Vec<(Rational, Vec<Rational>)>| v.into_iter().map(|(w, s)| (-w, s)).collect::<Vec<_>>();
        let mut b = TermBuilder::new(d);
        b.add_shifts(&a, &neg(shift_product(&self.delta(i), &self.nabla(j))));
        b.add_shifts(&a, &neg(shift_product(&self.delta(j), &self.nabla(i))));
        b.add_shifts(&a, &shift_product(&self.delta(i), &self.nabla(i)));
        b.add_shifts(&a, &shift_product(&self.delta(j), &self.nabla(j)));
        b.add_shifts(&zj.scale(&rat(-1)), &shift_product(&self.delta(i), &self.nabla(j)));
        b.add_shifts(&zi.scale(&rat(-1)), &shift_product(&self.delta(j), &self.nabla(i)));
        b.add_shifts(&zj, &self.delta(i));
        b.add_shifts(&zj, &neg(self.nabla(j)));
        b.add_shifts(&zi, &self.delta(j));
        b.add_shifts(&zi, &neg(self.nabla(i)));
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn constants_are_annihilated() {
        let fams = [
            PolyFamily::Hahn { ell: vec![rat(2), rat(3), rat(2)], n: rat(4) },
            PolyFamily::Krawtchouk { p: vec![ratio(1, 3), ratio(1, 4)], n: rat(4) },
            PolyFamily::Meixner { s: rat(2), c: vec![ratio(1, 3), ratio(1, 4)] },
            PolyFamily::Charlier { a: vec![rat(1), rat(2)] },
            PolyFamily::Oscillator { d: 2 },
        ];
        for f in &fams {
            for i in 1..=3 {
                for j in i + 1..=3 {
                    let img = f.l(i, j).unwrap().apply(&Poly::one(2));
                    assert!(img.is_zero(), "{f:?} {i} {j}");
                }
            }
        }
        let g = PolyFamily::GaugedOscillator { d: 2 };
        let half = ratio(1, 2);
        let z1 = Poly::var(2, 0);
        assert_eq!(
            g.l(1, 3).unwrap().apply(&Poly::one(2)),
            Poly::constant(2, half.clone()).sub(&z1.mul(&z1).scale(&half))
        );
        assert_eq!(g.dij(1, 2).unwrap().apply(&Poly::one(2)), z1.mul(&Poly::var(2, 1)));
        assert_eq!(PolyFamily::Charlier { a: vec![rat(1)] }.dij(1, 2).unwrap_err(), Error::UnsupportedPair(1, 2));
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(rational_sqrt(&rat(2)), None);
        assert!(RescaledCharlier::new(2, rat(3)).is_err());
        assert_eq!(RescaledCharlier::new(2, rat(2)).unwrap().h, ratio(1, 2));
    }
}
