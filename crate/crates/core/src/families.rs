//! Univariate and multivariate polynomial families: Hahn on polyhedra,
//! Krawtchouk, Meixner, Charlier and Hermite, plus the closed-form Hahn norm.
//!
//! Every multivariate product formula multiplies a univariate polynomial
//! `P_n(x; ..., M)` by `(-M)_n` where `M` may fall below `n`. The two are
//! fused into a single terminating sum with `(-M+k)_{n-k}` in place of
//! `1/(-M)_k`, which is polynomial in `M` and never divides by zero.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::exact::{factorial, hyp3f2_terminating, pochhammer, rat, sign, to_f64, Rational};

/// Classical Hahn polynomial `Q_n(x; a, b, M) = 3F2(-n, n+a+b+1, -x; a+1, -M; 1)`.
pub fn hahn_1d(n: u32, a: &Rational, b: &Rational, m: u32, x: u32) -> Result<Rational> {
    let upper = rat(n as i64) + a + b + rat(1);
    hyp3f2_terminating(n, &upper, x, &(a + rat(1)), m)
}

/// Checks both negative-integer-parameter rewritings of the classical Hahn
/// polynomial for `0 <= n <= l <= M`:
/// `Q_n(x; -l-1, b, M) = Q_n(x; -M-1, M-l+b, l)` on `x = 0..=l`, and
/// `Q_n(x; b, -l-1, M) = (-1)^n (-l)_n/(b+1)_n Q_n(M-x; -M-1, M-l+b, l)` on
/// `x = M-l..=M`.
pub fn hahn_1d_negparam_identity_check(n: u32, ell: u32, b: &Rational, m: u32) -> Result<bool> {
    if !(n <= ell && ell <= m) {
        return Err(Error::ParameterOutOfRange(format!("need n <= l <= M, got n={n}, l={ell}, M={m}")));
    }
    let neg = rat(-(ell as i64) - 1);
    let swapped_a = rat(-(m as i64) - 1);
    let swapped_b = rat(m as i64 - ell as i64) + b;
    for x in 0..=ell {
        let lhs = hahn_1d(n, &neg, b, m, x)?;
        let rhs = hahn_1d(n, &swapped_a, &swapped_b, ell, x)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    let bp1 = pochhammer(&(b + rat(1)), n);
    if bp1.is_zero() {
        return Err(Error::DenominatorPole { k: n });
    }
    let scale = sign(n as u64) * pochhammer(&rat(-(ell as i64)), n) / bp1;
    for x in m - ell..=m {
        let lhs = hahn_1d(n, b, &neg, m, x)?;
        let rhs = &scale * hahn_1d(n, &swapped_a, &swapped_b, ell, m - x)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fused factor `(-M)_n Q_n(x; -l-1, a, M)`:
/// `sum_k (-n)_k (n+a-l)_k (-x)_k (-M+k)_{n-k} / ((-l)_k k!)`, `k <= min(n, x)`.
pub fn hahn_factor(n: u32, ell: &Rational, a: &Rational, m: &Rational, x: u32) -> Result<Rational> {
    let upper = rat(n as i64) + a - ell;
    let neg_ell = -ell.clone();
    let mut sum = Rational::zero();
    let mut ratio = Rational::one(); // (-n)_k (upper)_k (-x)_k / ((-l)_k k!)
    for k in 0..=n.min(x) {
        if k > 0 {
            let kk = rat(k as i64 - 1);
            let den = (&neg_ell + &kk) * rat(k as i64);
            if den.is_zero() {
                return Err(Error::DenominatorPole { k });
            }
            ratio = ratio * (&kk - rat(n as i64)) * (&upper + &kk) * (&kk - rat(x as i64)) / den;
        }
        sum += &ratio * pochhammer(&(rat(k as i64) - m), n - k);
    }
    Ok(sum)
}

/// Hahn polynomials on a polyhedron for arbitrary rational `l` (the simplex
/// family corresponds to `l_i = -kappa_i - 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HahnParams {
    ell: Vec<Rational>,
    n: u32,
}

impl HahnParams {
    pub fn new(ell: Vec<Rational>, n: u32) -> Result<Self> {
        if ell.len() < 2 {
            return Err(Error::ParameterOutOfRange("need at least two entries in l".into()));
        }
        Ok(HahnParams { ell, n })
    }

    pub fn from_spec(spec: &DomainSpec) -> Self {
        HahnParams { ell: spec.ell_rational(), n: spec.n() }
    }

    /// Simplex parameters `kappa_i > -1`, mapped through `l_i = -kappa_i - 1`.
    pub fn from_kappa(kappa: &[Rational], n: u32) -> Result<Self> {
        if kappa.iter().any(|k| *k <= rat(-1)) {
            return Err(Error::ParameterOutOfRange("kappa_i must exceed -1".into()));
        }
        HahnParams::new(kappa.iter().map(|k| -k.clone() - rat(1)).collect(), n)
    }

    pub fn d(&self) -> usize {
        self.ell.len() - 1
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> &[Rational] {
        &self.ell
    }

    fn ell_suffix(&self, j: usize) -> Rational {
        self.ell[j - 1..].iter().sum()
    }

    /// `a_j = -|l^{j+1}| + 2|nu^{j+1}| - 1`, `j = 1..=d`.
    pub fn a_params(&self, nu: &[u32]) -> Vec<Rational> {
        let d = self.d();
        (1..=d)
            .map(|j| {
                let nu_tail: i64 = nu[j..].iter().map(|&v| v as i64).sum();
                -self.ell_suffix(j + 1) + rat(2 * nu_tail - 1)
            })
            .collect()
    }

    fn check_dims(&self, nu: &[u32], x: &[u32]) -> Result<()> {
        let d = self.d();
        if nu.len() != d || x.len() != d {
            return Err(Error::WrongDimension { expected: d, got: nu.len().min(x.len()) });
        }
        if x.iter().map(|&v| v as u64).sum::<u64>() > self.n as u64 {
            return Err(Error::PointOutsideDomain(x.to_vec()));
        }
        Ok(())
    }

    /// `Q_nu(x)`; errors with a pole if some `(a_j+1)_{nu_j}` or `(-N)_{|nu|}`
    /// vanishes (never for `nu` in `H`).
    pub fn eval(&self, nu: &[u32], x: &[u32]) -> Result<Rational> {
        self.check_dims(nu, x)?;
        let total: u32 = nu.iter().sum();
        let lead = pochhammer(&rat(-(self.n as i64)), total);
        if lead.is_zero() {
            return Err(Error::DenominatorPole { k: total });
        }
        let mut acc = sign(total as u64) / lead;
        let a = self.a_params(nu);
        let mut x_prefix = 0i64;
        for j in 0..self.d() {
            let nu_tail: i64 = nu[j + 1..].iter().map(|&v| v as i64).sum();
            let den = pochhammer(&(&a[j] + rat(1)), nu[j]);
            if den.is_zero() {
                return Err(Error::DenominatorPole { k: nu[j] });
            }
            let m = rat(self.n as i64 - x_prefix - nu_tail);
            acc *= pochhammer(&-self.ell[j].clone(), nu[j]) / den;
            acc *= hahn_factor(nu[j], &self.ell[j], &a[j], &m, x[j])?;
            if acc.is_zero() {
                return Ok(acc);
            }
            x_prefix += x[j] as i64;
        }
        Ok(acc)
    }

    /// Closed-form squared norm `B_nu`, with the quotients
    /// `(-|l|)_{N+|nu|}/(-|l|)_N` and `(c)_{2n}/(c)_n` taken as single
    /// Pochhammer symbols.
    pub fn norm(&self, nu: &[u32]) -> Result<Rational> {
        let total: u32 = nu.iter().sum();
        let ell_sum: Rational = self.ell.iter().sum();
        let n = rat(self.n as i64);
        let den = pochhammer(&-n.clone(), total) * pochhammer(&-ell_sum.clone(), 2 * total);
        if den.is_zero() {
            return Err(Error::DenominatorPole { k: 2 * total });
        }
        let mut acc = sign(total as u64) * pochhammer(&(n - &ell_sum), total) / den;
        let a = self.a_params(nu);
        for j in 0..self.d() {
            let c = &a[j] - &self.ell[j];
            let den = pochhammer(&(&a[j] + rat(1)), nu[j]);
            if den.is_zero() {
                return Err(Error::DenominatorPole { k: nu[j] });
            }
            acc *= pochhammer(&(c + rat(nu[j] as i64)), nu[j])
                * pochhammer(&-self.ell[j].clone(), nu[j])
                * Rational::from_integer(factorial(nu[j]))
                / den;
        }
        Ok(acc)
    }
}

/// `Q_nu(x; l, N)` for `nu` in `H` and `x` in `V`.
pub fn hahn_multi(spec: &DomainSpec, nu: &[u32], x: &[u32]) -> Result<Rational> {
    if !spec.contains_index(nu) {
        return Err(Error::IndexOutsideH(nu.to_vec()));
    }
    if !spec.contains_point(x) {
        return Err(Error::PointOutsideDomain(x.to_vec()));
    }
    HahnParams::from_spec(spec).eval(nu, x)
}

pub fn norm_b(spec: &DomainSpec, nu: &[u32]) -> Result<Rational> {
    if !spec.contains_index(nu) {
        return Err(Error::IndexOutsideH(nu.to_vec()));
    }
    HahnParams::from_spec(spec).norm(nu)
}

/// `K_n(x; p, M) = 2F1(-n, -x; -M; 1/p)` for `n, x <= M`.
pub fn krawtchouk_1d(n: u32, p: &Rational, m: u32, x: u32) -> Result<Rational> {
    if p.is_zero() {
        return Err(Error::ParameterOutOfRange("p must be nonzero".into()));
    }
    if n > m || x > m {
        return Err(Error::ParameterOutOfRange(format!("need n, x <= M = {m}")));
    }
    let inv_p = p.recip();
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for k in 0..n.min(x) {
        let kk = k as i64;
        term = term * rat(kk - n as i64) * rat(kk - x as i64) * &inv_p / (rat(kk - m as i64) * rat(kk + 1));
        sum += &term;
    }
    Ok(sum)
}

/// Fused factor `(-M)_n K_n(x; q, M) = sum_k (-n)_k (-x)_k (-M+k)_{n-k} q^{-k} / k!`
/// for rational `M`.
pub fn krawtchouk_factor(n: u32, q: &Rational, m: &Rational, x: u32) -> Result<Rational> {
    if q.is_zero() {
        return Err(Error::ParameterOutOfRange("Krawtchouk argument must be nonzero".into()));
    }
    let inv_q = q.recip();
    let mut sum = Rational::zero();
    let mut coef = Rational::one();
    for k in 0..=n.min(x) {
        if k > 0 {
            let kk = k as i64 - 1;
            coef = coef * rat(kk - n as i64) * rat(kk - x as i64) * &inv_q / rat(k as i64);
        }
        sum += &coef * pochhammer(&(rat(k as i64) - m), n - k);
    }
    Ok(sum)
}

/// Multivariate Krawtchouk with formal (rational) `N`; the Meixner family
/// is the specialization `N = -s`, `p_j = -c_j/(1-|c|)`.
pub fn krawtchouk_multi_generic(p: &[Rational], n: &Rational, nu: &[u32], x: &[u32]) -> Result<Rational> {
    if nu.len() != p.len() || x.len() != p.len() {
        return Err(Error::WrongDimension { expected: p.len(), got: nu.len().min(x.len()) });
    }
    let total: u32 = nu.iter().sum();
    let lead = pochhammer(&-n.clone(), total);
    if lead.is_zero() {
        return Err(Error::DenominatorPole { k: total });
    }
    let mut acc = lead.recip();
    let mut p_prefix = Rational::zero();
    let mut x_prefix = 0i64;
    for j in 0..p.len() {
        let nu_tail: i64 = nu[j + 1..].iter().map(|&v| v as i64).sum();
        let rest = rat(1) - &p_prefix;
        if rest.is_zero() {
            return Err(Error::ParameterOutOfRange("1 - |p_{j-1}| vanishes".into()));
        }
        let q = &p[j] / rest;
        let m = n - rat(x_prefix + nu_tail);
        acc *= krawtchouk_factor(nu[j], &q, &m, x[j])?;
        p_prefix += &p[j];
        x_prefix += x[j] as i64;
    }
    Ok(acc)
}

/// Parameters of the non-Hahn families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilyParams {
    Krawtchouk {
        #[serde(with = "rational_vec")]
        p: Vec<Rational>,
        #[serde(rename = "N")]
        n: u32,
    },
    Meixner {
        #[serde(with = "rational_one")]
        s: Rational,
        #[serde(with = "rational_vec")]
        c: Vec<Rational>,
    },
    Charlier {
        #[serde(with = "rational_vec")]
        a: Vec<Rational>,
    },
}

mod rational_vec {
    use super::Rational;
    use crate::exact::RationalString;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| RationalString(r.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Ok(Vec::<RationalString>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

mod rational_one {
    use super::Rational;
    use crate::exact::RationalString;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalString(v.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        Ok(RationalString::deserialize(d)?.0)
    }
}

fn positive_with_sum_below_one(v: &[Rational], name: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::ParameterOutOfRange(format!("{name} must be nonempty")));
    }
    if v.iter().any(|c| !c.is_positive()) {
        return Err(Error::ParameterOutOfRange(format!("every {name}_i must be positive")));
    }
    let s: Rational = v.iter().sum();
    if s >= rat(1) {
        return Err(Error::ParameterOutOfRange(format!("|{name}| = {s} must be below 1")));
    }
    Ok(())
}

impl FamilyParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParams::Krawtchouk { p, n } => {
                if *n == 0 {
                    return Err(Error::ParameterOutOfRange("N must be positive".into()));
                }
                positive_with_sum_below_one(p, "p")
            }
            FamilyParams::Meixner { s, c } => {
                if !s.is_positive() {
                    return Err(Error::ParameterOutOfRange("s must be positive".into()));
                }
                positive_with_sum_below_one(c, "c")
            }
            FamilyParams::Charlier { a } => {
                if a.is_empty() || a.iter().any(|v| !v.is_positive()) {
                    return Err(Error::ParameterOutOfRange("every a_i must be positive".into()));
                }
                Ok(())
            }
        }
    }

    pub fn d(&self) -> usize {
        match self {
            FamilyParams::Krawtchouk { p, .. } => p.len(),
            FamilyParams::Meixner { c, .. } => c.len(),
            FamilyParams::Charlier { a } => a.len(),
        }
    }

    pub fn eval(&self, nu: &[u32], x: &[u32]) -> Result<Rational> {
        match self {
            FamilyParams::Krawtchouk { p, n } => krawtchouk_multi(p, *n, nu, x),
            FamilyParams::Meixner { s, c } => meixner_multi(s, c, nu, x),
            FamilyParams::Charlier { a } => {
                let xr: Vec<Rational> = x.iter().map(|&v| rat(v as i64)).collect();
                charlier_multi(a, nu, &xr)
            }
        }
    }
}

/// `K_nu(x; p, N)` for `|nu| <= N`, `x` in the simplex `V_N^d`.
pub fn krawtchouk_multi(p: &[Rational], n: u32, nu: &[u32], x: &[u32]) -> Result<Rational> {
    FamilyParams::Krawtchouk { p: p.to_vec(), n }.validate()?;
    if nu.iter().sum::<u32>() > n {
        return Err(Error::ParameterOutOfRange(format!("|nu| must not exceed N = {n}")));
    }
    if x.iter().sum::<u32>() > n {
        return Err(Error::PointOutsideDomain(x.to_vec()));
    }
    krawtchouk_multi_generic(p, &rat(n as i64), nu, x)
}

/// Multinomial weight `N!/(x! (N-|x|)!) prod p_i^{x_i} (1-|p|)^{N-|x|}`.
pub fn krawtchouk_weight(p: &[Rational], n: u32, x: &[u32]) -> Result<Rational> {
    let total: u32 = x.iter().sum();
    if total > n || x.len() != p.len() {
        return Err(Error::PointOutsideDomain(x.to_vec()));
    }
    let rest = rat(1) - p.iter().sum::<Rational>();
    let mut w = Rational::from_integer(factorial(n)) / Rational::from_integer(factorial(n - total));
    w *= num_traits::pow(rest, (n - total) as usize);
    for (pi, &xi) in p.iter().zip(x) {
        w *= num_traits::pow(pi.clone(), xi as usize) / Rational::from_integer(factorial(xi));
    }
    Ok(w)
}

/// `M_n(x; beta, c) = 2F1(-n, -x; beta; 1 - 1/c)`.
pub fn meixner_1d(n: u32, beta: &Rational, c: &Rational, x: u32) -> Result<Rational> {
    if c.is_zero() {
        return Err(Error::ParameterOutOfRange("c must be nonzero".into()));
    }
    let z = rat(1) - c.recip();
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for k in 0..n.min(x) {
        let kk = k as i64;
        let den = (beta + rat(kk)) * rat(kk + 1);
        if den.is_zero() {
            return Err(Error::DenominatorPole { k: k + 1 });
        }
        term = term * rat(kk - n as i64) * rat(kk - x as i64) * &z / den;
        sum += &term;
    }
    Ok(sum)
}

/// `M_nu(x; s, c) = 1/(s)_{|nu|} prod_j (beta_j)_{nu_j} M_{nu_j}(x_j; beta_j, c_j/(1-|c^{j+1}|))`
/// with `beta_j = s + |x_{j-1}| + |nu^{j+1}|`.
pub fn meixner_multi(s: &Rational, c: &[Rational], nu: &[u32], x: &[u32]) -> Result<Rational> {
    FamilyParams::Meixner { s: s.clone(), c: c.to_vec() }.validate()?;
    if nu.len() != c.len() || x.len() != c.len() {
        return Err(Error::WrongDimension { expected: c.len(), got: nu.len().min(x.len()) });
    }
    let total: u32 = nu.iter().sum();
    let mut acc = pochhammer(s, total).recip();
    let mut x_prefix = 0i64;
    for j in 0..c.len() {
        let nu_tail: i64 = nu[j + 1..].iter().map(|&v| v as i64).sum();
        let c_tail: Rational = c[j + 1..].iter().sum();
        let beta = s + rat(x_prefix + nu_tail);
        let cj = &c[j] / (rat(1) - c_tail);
        acc *= pochhammer(&beta, nu[j]) * meixner_1d(nu[j], &beta, &cj, x[j])?;
        x_prefix += x[j] as i64;
    }
    Ok(acc)
}

/// `C_n(t; a) = 2F0(-n, -t; ; -1/a)` for rational `t`.
pub fn charlier_1d(n: u32, a: &Rational, t: &Rational) -> Result<Rational> {
    if !a.is_positive() {
        return Err(Error::ParameterOutOfRange("a must be positive".into()));
    }
    let z = -a.recip();
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for k in 0..n {
        let kk = rat(k as i64);
        term = term * (&kk - rat(n as i64)) * (&kk - t) * &z / rat(k as i64 + 1);
        sum += &term;
    }
    Ok(sum)
}

pub fn charlier_multi(a: &[Rational], nu: &[u32], x: &[Rational]) -> Result<Rational> {
    FamilyParams::Charlier { a: a.to_vec() }.validate()?;
    if nu.len() != a.len() || x.len() != a.len() {
        return Err(Error::WrongDimension { expected: a.len(), got: nu.len().min(x.len()) });
    }
    let mut acc = Rational::one();
    for ((n, ai), xi) in nu.iter().zip(a).zip(x) {
        acc *= charlier_1d(*n, ai, xi)?;
    }
    Ok(acc)
}

/// Physicists' Hermite polynomial via `H_{n+1} = 2t H_n - 2n H_{n-1}`.
pub fn hermite_1d(n: u32, t: &Rational) -> Rational {
    let mut prev = Rational::one();
    if n == 0 {
        return prev;
    }
    let two_t = t * rat(2);
    let mut cur = two_t.clone();
    for k in 1..n {
        let next = &two_t * &cur - rat(2 * k as i64) * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Outcome of a truncated floating-point orthogonality check on `N_0^d`.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedOrthogonality {
    pub radius: u32,
    /// Largest `|<P_nu, P_mu>| / sqrt(<P_nu,P_nu><P_mu,P_mu>)` over `nu != mu`.
    pub max_relative_offdiag: f64,
    /// Largest weighted term on the outermost shell relative to the largest
    /// term overall.
    pub tail_ratio: f64,
    pub holds: bool,
}

/// Orthogonality of the Meixner or Charlier family on the box `[0, R]^d`,
/// with the weight up to a constant factor (`(s)_{|x|} prod c_i^{x_i}/x_i!`
/// resp. `prod a_i^{x_i}/x_i!`). `R` grows until the outer shell is below
/// `1e-14` of the leading term; the check passes at relative tolerance
/// `1e-10`.
pub fn truncated_orthogonality(params: &FamilyParams, indices: &[Vec<u32>]) -> Result<TruncatedOrthogonality> {
    params.validate()?;
    let d = params.d();
    let weight = |x: &[u32]| -> Result<Rational> {
        match params {
            FamilyParams::Meixner { s, c } => {
                let total: u32 = x.iter().sum();
                let mut w = pochhammer(s, total);
                for (ci, &xi) in c.iter().zip(x) {
                    w *= num_traits::pow(ci.clone(), xi as usize) / Rational::from_integer(factorial(xi));
                }
                Ok(w)
            }
            FamilyParams::Charlier { a } => {
                let mut w = Rational::one();
                for (ai, &xi) in a.iter().zip(x) {
                    w *= num_traits::pow(ai.clone(), xi as usize) / Rational::from_integer(factorial(xi));
                }
                Ok(w)
            }
            FamilyParams::Krawtchouk { .. } => {
                Err(Error::ParameterOutOfRange("Krawtchouk orthogonality is finite; use an exact Gram".into()))
            }
        }
    };
    let k = indices.len();
    let mut gram = vec![0f64; k * k];
    let mut max_term = 0f64;
    let mut radius = 0u32;
    let mut shell_max;
    loop {
        // points with max coordinate exactly `radius`
        shell_max = 0f64;
        let mut x = vec![0u32; d];
        loop {
            if x.contains(&radius) {
                let w = to_f64(&weight(&x)?);
                let vals: Vec<f64> = indices.iter().map(|nu| params.eval(nu, &x).map(|v| to_f64(&v))).collect::<Result<_>>()?;
                for a in 0..k {
                    for b in 0..k {
                        let t = w * vals[a] * vals[b];
                        gram[a * k + b] += t;
                        let mag = t.abs();
                        max_term = max_term.max(mag);
                        shell_max = shell_max.max(mag);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    break;
                }
                if x[i] < radius {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
        let tail_ratio = shell_max / max_term;
        if radius >= 8 && tail_ratio < 1e-14 {
            break;
        }
        if radius >= 400 {
            break;
        }
        radius += 1;
    }
    let mut worst = 0f64;
    for a in 0..k {
        for b in 0..k {
            if a != b {
                let r = gram[a * k + b].abs() / (gram[a * k + a] * gram[b * k + b]).sqrt();
                worst = worst.max(r);
            }
        }
    }
    let tail_ratio = shell_max / max_term;
    Ok(TruncatedOrthogonality {
        radius,
        max_relative_offdiag: worst,
        tail_ratio,
        holds: worst <= 1e-10 && tail_ratio < 1e-14,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{admissible_specs, check_admissible, enumerate_h, enumerate_v, weight};
    use crate::exact::ratio;
    use proptest::prelude::*;

    fn spec222() -> DomainSpec {
        check_admissible(2, 3, &[2, 2, 2]).unwrap()
    }

    #[test]
    fn hahn_1d_examples() {
        let (a, b) = (ratio(1, 2), ratio(3, 4));
        for x in 0..=5 {
            assert_eq!(hahn_1d(0, &a, &b, 5, x).unwrap(), rat(1));
            let q1 = rat(1) - (&a + &b + rat(2)) * rat(x as i64) / ((&a + rat(1)) * rat(5));
            assert_eq!(hahn_1d(1, &a, &b, 5, x).unwrap(), q1);
        }
        assert_eq!(hahn_1d(3, &a, &b, 5, 0).unwrap(), rat(1));
    }

    #[test]
    fn negparam_identities() {
        assert!(hahn_1d_negparam_identity_check(2, 3, &ratio(1, 2), 5).unwrap());
        assert!(hahn_1d_negparam_identity_check(0, 3, &ratio(1, 2), 5).unwrap());
        let bs = [ratio(1, 3), ratio(5, 2), ratio(-1, 7), rat(4), ratio(11, 5)];
        let mut cases = 0;
        for m in 0..=8u32 {
            for ell in 0..=m {
                for n in 0..=ell {
                    for b in &bs {
                        assert!(hahn_1d_negparam_identity_check(n, ell, b, m).unwrap(), "{n} {ell} {b} {m}");
                        cases += 1;
                    }
                }
            }
        }
        assert!(cases >= 50);
        assert!(hahn_1d_negparam_identity_check(4, 3, &rat(1), 5).is_err());
    }

    #[test]
    fn hahn_factor_edges() {
        let (l, a, m) = (rat(4), ratio(-7, 1), rat(2));
        assert_eq!(hahn_factor(0, &l, &a, &m, 3).unwrap(), rat(1));
        // x = 0 leaves (-M)_n
        assert_eq!(hahn_factor(3, &l, &a, &m, 0).unwrap(), pochhammer(&-m.clone(), 3));
    }

    #[test]
    fn hahn_factor_matches_unfused_product() {
        // oracle: (-M)_n * 3F2 evaluated separately, valid when M >= n
        let mut seen = 0;
        for m in 0..=7u32 {
            for n in 0..=m {
                for ell in n..=n + 3 {
                    for x in 0..=m {
                        let a = ratio(-(2 * ell as i64) - 3, 1) + ratio(x as i64, 3);
                        let fused = hahn_factor(n, &rat(ell as i64), &a, &rat(m as i64), x).unwrap();
                        let q = hahn_1d(n, &rat(-(ell as i64) - 1), &a, m, x).unwrap();
                        assert_eq!(fused, pochhammer(&rat(-(m as i64)), n) * q);
                        seen += 1;
                    }
                }
            }
        }
        assert!(seen >= 100);
    }

    #[test]
    fn hahn_small_values() {
        let s = spec222();
        for x in enumerate_v(&s).points() {
            assert_eq!(hahn_multi(&s, &[0, 0], x).unwrap(), rat(1));
        }
        assert_eq!(norm_b(&s, &[0, 0]).unwrap(), rat(1));
        assert_eq!(norm_b(&s, &[1, 0]).unwrap(), ratio(1, 10));
        let g: Rational = enumerate_v(&s)
            .points()
            .iter()
            .map(|x| weight(&s, x).unwrap() * num_traits::pow(hahn_multi(&s, &[1, 0], x).unwrap(), 2))
            .sum();
        assert_eq!(g, ratio(1, 10));
        assert_eq!(hahn_multi(&s, &[2, 2], &[1, 1]), Err(Error::IndexOutsideH(vec![2, 2])));
        assert_eq!(hahn_multi(&s, &[0, 0], &[0, 0]), Err(Error::PointOutsideDomain(vec![0, 0])));
    }

    fn gram_diagonal_with_norms(s: &DomainSpec) {
        let v = enumerate_v(s);
        let h = enumerate_h(s);
        let w: Vec<Rational> = v.points().iter().map(|x| weight(s, x).unwrap()).collect();
        let vals: Vec<Vec<Rational>> = h
            .indices()
            .iter()
            .map(|nu| v.points().iter().map(|x| hahn_multi(s, nu, x).unwrap()).collect())
            .collect();
        for (a, nu) in h.indices().iter().enumerate() {
            for b in a..h.len() {
                let ip: Rational = (0..v.len()).map(|k| &w[k] * &vals[a][k] * &vals[b][k]).sum();
                if a == b {
                    let bn = norm_b(s, nu).unwrap();
                    assert!(bn.is_positive());
                    assert_eq!(ip, bn, "{s:?} {nu}");
                } else {
                    assert!(ip.is_zero(), "{s:?} {nu} {}", h.indices()[b]);
                }
            }
        }
    }

    #[test]
    fn hahn_orthogonality_small_specs() {
        gram_diagonal_with_norms(&spec222());
        for d in 1..=2 {
            for n in 1..=4 {
                for s in admissible_specs(d, n) {
                    gram_diagonal_with_norms(&s);
                }
            }
        }
        gram_diagonal_with_norms(&check_admissible(3, 4, &[3, 2, 4, 3]).unwrap());
    }

    #[test]
    fn simplex_kappa_orthogonality() {
        let kappa = [ratio(1, 2), ratio(1, 3), rat(2)];
        for n in 1..=4u32 {
            let hp = HahnParams::from_kappa(&kappa, n).unwrap();
            let simplex = DomainSpec::simplex(2, n).unwrap();
            let pts = enumerate_v(&simplex);
            let idx: Vec<Vec<u32>> = pts.points().iter().map(|p| p.0.clone()).collect();
            let w: Vec<Rational> =
                idx.iter().map(|x| crate::domains::weight_generic(hp.ell(), n, x).unwrap()).collect();
            for nu in &idx {
                for mu in &idx {
                    let ip: Rational =
                        idx.iter().zip(&w).map(|(x, wx)| wx * hp.eval(nu, x).unwrap() * hp.eval(mu, x).unwrap()).sum();
                    if nu == mu {
                        assert_eq!(ip, hp.norm(nu).unwrap());
                        assert!(ip.is_positive());
                    } else {
                        assert!(ip.is_zero());
                    }
                }
            }
        }
        assert!(HahnParams::from_kappa(&[rat(-1), rat(0), rat(0)], 2).is_err());
    }

    #[test]
    fn krawtchouk_examples() {
        let p = [ratio(1, 3), ratio(1, 3)];
        let n = 4;
        let simplex = DomainSpec::simplex(2, n).unwrap();
        let pts: Vec<Vec<u32>> = enumerate_v(&simplex).points().iter().map(|x| x.0.clone()).collect();
        for x in &pts {
            assert_eq!(krawtchouk_multi(&p, n, &[0, 0], x).unwrap(), rat(1));
        }
        let w: Vec<Rational> = pts.iter().map(|x| krawtchouk_weight(&p, n, x).unwrap()).collect();
        assert_eq!(w.iter().sum::<Rational>(), rat(1));
        for nu in &pts {
            for mu in &pts {
                let ip: Rational = pts
                    .iter()
                    .zip(&w)
                    .map(|(x, wx)| wx * krawtchouk_multi(&p, n, nu, x).unwrap() * krawtchouk_multi(&p, n, mu, x).unwrap())
                    .sum();
                assert_eq!(ip.is_zero(), nu != mu, "{nu:?} {mu:?}");
            }
        }
        // univariate fused factor agrees with (-M)_n K_n
        for m in 0..=6u32 {
            for nn in 0..=m {
                for x in 0..=m {
                    let q = ratio(2, 7);
                    let fused = krawtchouk_factor(nn, &q, &rat(m as i64), x).unwrap();
                    assert_eq!(fused, pochhammer(&rat(-(m as i64)), nn) * krawtchouk_1d(nn, &q, m, x).unwrap());
                }
            }
        }
        assert!(krawtchouk_multi(&[ratio(1, 2), ratio(1, 2)], 3, &[0, 0], &[0, 0]).is_err());
    }

    #[test]
    fn meixner_matches_krawtchouk_substitution() {
        let s = ratio(5, 2);
        let c = [ratio(1, 4), ratio(1, 5)];
        let rest = rat(1) - c.iter().sum::<Rational>();
        let p: Vec<Rational> = c.iter().map(|ci| -ci.clone() / &rest).collect();
        let formal_n = -s.clone();
        let mut cases = 0;
        for nu in [[0u32, 0], [1, 0], [0, 1], [2, 1], [1, 2], [3, 0]] {
            for x in [[0u32, 0], [1, 0], [2, 3], [4, 1], [0, 5], [3, 3], [6, 2]] {
                let m = meixner_multi(&s, &c, &nu, &x).unwrap();
                let k = krawtchouk_multi_generic(&p, &formal_n, &nu, &x).unwrap();
                assert_eq!(m, k, "{nu:?} {x:?}");
                cases += 1;
            }
        }
        assert!(cases >= 40);
        assert_eq!(meixner_1d(3, &s, &c[0], 0).unwrap(), rat(1));
    }

    #[test]
    fn charlier_hermite_examples() {
        let s = ratio(3, 2);
        let t = ratio(5, 7);
        assert_eq!(charlier_1d(0, &s, &t).unwrap(), rat(1));
        assert_eq!(charlier_1d(1, &s, &t).unwrap(), rat(1) - &t / &s);
        assert_eq!(hermite_1d(0, &t), rat(1));
        assert_eq!(hermite_1d(1, &t), &t * rat(2));
        assert_eq!(hermite_1d(2, &t), &t * &t * rat(4) - rat(2));
        assert_eq!(hermite_1d(3, &t), &t * &t * &t * rat(8) - &t * rat(12));
        assert!(charlier_1d(1, &rat(0), &t).is_err());
    }

    #[test]
    fn family_param_validation() {
        assert!(FamilyParams::Krawtchouk { p: vec![ratio(1, 2), ratio(1, 2)], n: 3 }.validate().is_err());
        assert!(FamilyParams::Meixner { s: rat(0), c: vec![ratio(1, 2)] }.validate().is_err());
        assert!(FamilyParams::Charlier { a: vec![rat(-1)] }.validate().is_err());
        let f = FamilyParams::Meixner { s: ratio(3, 2), c: vec![ratio(1, 3)] };
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(js, r#"{"family":"meixner","s":"3/2","c":["1/3"]}"#);
        assert_eq!(serde_json::from_str::<FamilyParams>(&js).unwrap(), f);
    }

    #[test]
    fn truncated_orthogonality_infinite_families() {
        let idx = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 0]];
        let m = truncated_orthogonality(&FamilyParams::Meixner { s: ratio(3, 2), c: vec![ratio(1, 5), ratio(1, 4)] }, &idx)
            .unwrap();
        assert!(m.holds, "{m:?}");
        let c = truncated_orthogonality(&FamilyParams::Charlier { a: vec![ratio(3, 2), rat(1)] }, &idx).unwrap();
        assert!(c.holds, "{c:?}");
    }

    proptest! {
        #[test]
        fn hahn_weight_norm_positive(n in 2u32..6, l1 in 0u32..6, l2 in 0u32..6, l3 in 0u32..6) {
            let ell = [l1.min(n).max(1), l2.min(n).max(1), l3.min(n).max(1)];
            if let Ok(s) = check_admissible(2, n, &ell) {
                for nu in enumerate_h(&s).indices() {
                    prop_assert!(norm_b(&s, nu).unwrap().is_positive());
                }
            }
        }

        #[test]
        fn charlier_at_zero_is_one(n in 0u32..8, p in 1i64..20, q in 1i64..5) {
            prop_assert_eq!(charlier_1d(n, &ratio(p, q), &rat(0)).unwrap(), rat(1));
        }
    }
}
