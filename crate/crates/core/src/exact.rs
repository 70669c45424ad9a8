//! Exact scalar kernels: rationals, Pochhammer symbols, binomials and the
//! terminating hypergeometric sums every polynomial family is built from.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction in canonical form (positive denominator,
/// reduced). Display prints `p/q`, or `p` when `q = 1`.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, `p`, or a plain decimal like `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse rational from {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut num = BigInt::from_str(&digits).map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing a rational as its canonical string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalString(pub Rational);

impl fmt::Debug for RationalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for RationalString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(RationalString)
            .map_err(serde::de::Error::custom)
    }
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..n {
        if term.is_zero() {
            return Rational::zero();
        }
        acc *= &term;
        term += BigInt::one();
    }
    acc
}

/// Rising factorial of an integer argument, kept in the integers.
pub fn pochhammer_int(a: i64, n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 0..n as i64 {
        let f = a + k;
        if f == 0 {
            return BigInt::zero();
        }
        acc *= f;
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

/// `binom(a, k)` for `a >= 0`; zero when `a < k`.
pub fn binomial(a: i64, k: u64) -> Result<BigInt> {
    if a < 0 {
        return Err(Error::NegativeBinomial(a));
    }
    let a = a as u64;
    if k > a {
        return Ok(BigInt::zero());
    }
    let k = k.min(a - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= a - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// `binom(a, k)` where a negative `a` (only reachable as `N - l_i + d - 1`
/// with `l_i > N`, never under admissibility) counts as zero lattice points.
pub(crate) fn binomial_count(a: i64, k: u64) -> BigInt {
    binomial(a, k).unwrap_or_else(|_| BigInt::zero())
}

/// Terminating `3F2(-n, upper2, -x; lower1, -lower_m; 1)`, truncated at
/// `min(n, x)`.
pub fn hyp3f2_terminating(
    n: u32,
    upper2: &Rational,
    x: u32,
    lower1: &Rational,
    lower_m: u32,
) -> Result<Rational> {
    let kmax = n.min(x);
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for k in 0..kmax {
        // ratio term_{k+1} / term_k
        let kk = k as i64;
        let den_a = lower1 + rat(kk);
        let den_m = -(lower_m as i64) + kk;
        if den_a.is_zero() || den_m == 0 {
            return Err(Error::DenominatorPole { k: k + 1 });
        }
        let num = rat(kk - n as i64) * (upper2 + rat(kk)) * rat(kk - x as i64);
        term = term * num / (den_a * rat(den_m) * rat(kk + 1));
        sum += &term;
    }
    Ok(sum)
}

/// Multi-index of non-negative integers with the prefix/suffix sums used
/// throughout: `|y_j| = y_1 + ... + y_j` and `|y^j| = y_j + ... + y_d`
/// (1-based, `|y_0| = |y^{d+1}| = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&v| v as u64).sum()
    }

    pub fn prefix_sum(&self, j: usize) -> u64 {
        self.0[..j].iter().map(|&v| v as u64).sum()
    }

    pub fn suffix_sum(&self, j: usize) -> u64 {
        if j == 0 || j > self.0.len() {
            return 0;
        }
        self.0[j - 1..].iter().map(|&v| v as u64).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl std::ops::Deref for MultiIndex {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `(-1)^k`.
pub(crate) fn sign(k: u64) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&ratio(7, 3), 0), rat(1));
        assert_eq!(pochhammer(&rat(-2), 3), rat(0));
        assert_eq!(pochhammer(&rat(-3), 2), rat(6));
        assert_eq!(pochhammer_int(-3, 2), BigInt::from(6));
        assert_eq!(pochhammer(&ratio(1, 2), 2), ratio(3, 4));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2).unwrap(), BigInt::from(10));
        assert_eq!(binomial(9, 0).unwrap(), BigInt::from(1));
        assert_eq!(binomial(2, 3).unwrap(), BigInt::from(0));
        assert_eq!(binomial(-1, 2), Err(Error::NegativeBinomial(-1)));
    }

    #[test]
    fn binomial_pascal() {
        for a in 1..=60i64 {
            for k in 0..a as u64 {
                let lhs = binomial(a, k).unwrap() + binomial(a, k + 1).unwrap();
                assert_eq!(lhs, binomial(a + 1, k + 1).unwrap());
            }
        }
    }

    fn compositions(k: usize, max: i64, f: &mut impl FnMut(i64)) {
        // calls f(|b|) for every b in N_0^k with |b| <= max
        fn rec(k: usize, left: i64, used: i64, f: &mut impl FnMut(i64)) {
            if k == 0 {
                f(used);
                return;
            }
            for v in 0..=left {
                rec(k - 1, left - v, used + v, f);
            }
        }
        rec(k, max, 0, f);
    }

    #[test]
    fn binomial_summation_identity() {
        // sum_{b in N_0^k, |b| <= M} binom(M - |b| + j, j + 1) = binom(M + j + k, j + k + 1)
        for m in 0..=8i64 {
            for j in 0..=4i64 {
                for k in 0..=4usize {
                    let mut lhs = BigInt::zero();
                    compositions(k, m, &mut |s| {
                        lhs += binomial(m - s + j, (j + 1) as u64).unwrap();
                    });
                    let rhs = binomial(m + j + k as i64, (j + k as i64 + 1) as u64).unwrap();
                    assert_eq!(lhs, rhs, "M={m} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn hyp3f2_examples() {
        let a = ratio(1, 2);
        let b = ratio(3, 4);
        let n_dom = 5u32;
        assert_eq!(hyp3f2_terminating(0, &a, 3, &b, n_dom).unwrap(), rat(1));
        assert_eq!(hyp3f2_terminating(4, &a, 0, &b, n_dom).unwrap(), rat(1));
        // n = 1 with Hahn parameters: 1 - (a+b+2) x / ((a+1) N)
        for x in 0..=5u32 {
            let upper2 = &a + &b + rat(2);
            let lower1 = &a + rat(1);
            let got = hyp3f2_terminating(1, &upper2, x, &lower1, n_dom).unwrap();
            let want = rat(1) - &upper2 * rat(x as i64) / (&lower1 * rat(n_dom as i64));
            assert_eq!(got, want);
        }
    }

    #[test]
    fn hyp3f2_pole_detected() {
        // (lower1)_k vanishes at k = 2 when lower1 = -1
        let err = hyp3f2_terminating(3, &rat(1), 3, &rat(-1), 10).unwrap_err();
        assert_eq!(err, Error::DenominatorPole { k: 2 });
    }

    #[test]
    fn rational_format_and_parse() {
        assert_eq!(ratio(-6, 4).to_string(), "-3/2");
        assert_eq!(ratio(6, -3).to_string(), "-2");
        assert_eq!(parse_rational("-3/2").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn multi_index_sums() {
        let y = MultiIndex::new(vec![1, 2, 3]);
        assert_eq!(y.prefix_sum(0), 0);
        assert_eq!(y.prefix_sum(2), 3);
        assert_eq!(y.suffix_sum(1), 6);
        assert_eq!(y.suffix_sum(3), 3);
        assert_eq!(y.suffix_sum(4), 0);
    }

    proptest! {
        #[test]
        fn pochhammer_splits(p in -50i64..50, q in 1i64..12, m in 0u32..=20, n in 0u32..=20) {
            let a = ratio(p, q);
            let lhs = pochhammer(&a, m + n);
            let rhs = pochhammer(&a, m) * pochhammer(&(&a + rat(m as i64)), n);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hyp3f2_trivial_edges(n in 0u32..8, x in 0u32..8, p in 1i64..30, q in 1i64..7) {
            let u = ratio(p, q);
            let l = ratio(p + q, q);
            prop_assert_eq!(hyp3f2_terminating(0, &u, x, &l, 8).unwrap(), rat(1));
            prop_assert_eq!(hyp3f2_terminating(n, &u, 0, &l, 8).unwrap(), rat(1));
        }
    }
}
