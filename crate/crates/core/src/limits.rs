//! Convergence scans for the limit transitions between families and to the
//! continuous Jacobi operator. Every rung is evaluated exactly; decimals
//! appear only in the reported errors and fitted orders.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat, ratio, to_f64, Rational};
use crate::families::{charlier_1d, charlier_multi, hermite_1d, krawtchouk_multi, krawtchouk_multi_generic, FamilyParams, HahnParams};
use crate::operators::PolyFamily;
use crate::poly::Poly;

/// Successive errors may grow by at most this factor past the first rung.
pub const MONOTONE_SLACK: f64 = 1.05;

pub const SCAN_NAMES: [&str; 4] = ["hahn-krawtchouk", "krawtchouk-charlier", "charlier-hermite", "operator-jacobi"];

#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    pub probe: String,
    pub errors: Vec<f64>,
    pub exact_zero: bool,
    pub monotone: bool,
    pub fitted_order: Option<f64>,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitScan {
    pub name: String,
    /// Name of the ladder parameter (`t`, `N` or `a`).
    pub parameter: String,
    pub ladder: Vec<String>,
    pub expected_order: f64,
    pub tolerance: f64,
    pub probes: Vec<ProbeResult>,
    pub notes: Vec<String>,
    pub passes: bool,
}

impl LimitScan {
    /// `parameter,probe,error,fitted_order` rows; the order is repeated per probe.
    pub fn to_csv(&self) -> String {
        let mut out = format!("scan,{},probe,error,fitted_order\n", self.parameter);
        for p in &self.probes {
            let order = p.fitted_order.map_or(String::new(), |o| format!("{o:.6}"));
            for (rung, e) in self.ladder.iter().zip(&p.errors) {
                out.push_str(&format!("{},{rung},\"{}\",{e:.6e},{order}\n", self.name, p.probe));
            }
        }
        out
    }
}

const RATE_NOTE: &str = "expected orders are implementer-derived thresholds, not stated rates";

fn fit_order(ladder: &[Rational], errors: &[f64]) -> Option<f64> {
    let n = errors.len();
    if n < 2 || errors[n - 1] == 0.0 || errors[n - 2] == 0.0 {
        return None;
    }
    let scale = (to_f64(&ladder[n - 1]) / to_f64(&ladder[n - 2])).ln();
    Some((errors[n - 2] / errors[n - 1]).ln() / scale)
}

fn probe_result(probe: String, ladder: &[Rational], exact: &[Rational], expected: f64, tol: f64) -> ProbeResult {
    let errors: Vec<f64> = exact.iter().map(|e| to_f64(e).abs()).collect();
    let exact_zero = exact.iter().all(|e| *e == rat(0));
    let monotone = errors.windows(2).skip(1).all(|w| w[1] <= w[0] * MONOTONE_SLACK);
    let fitted_order = fit_order(ladder, &errors);
    let passes = exact_zero || (monotone && fitted_order.is_some_and(|o| (o - expected).abs() <= tol));
    ProbeResult { probe, errors, exact_zero, monotone, fitted_order, passes }
}

fn finish(name: &str, parameter: &str, ladder: &[Rational], expected: f64, tol: f64, probes: Vec<ProbeResult>, mut notes: Vec<String>) -> LimitScan {
    notes.push(RATE_NOTE.into());
    let passes = !probes.is_empty() && probes.iter().all(|p| p.passes);
    LimitScan {
        name: name.into(),
        parameter: parameter.into(),
        ladder: ladder.iter().map(|r| r.to_string()).collect(),
        expected_order: expected,
        tolerance: tol,
        probes,
        notes,
        passes,
    }
}

fn check_ladder(ladder: &[Rational]) -> Result<()> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[1] <= w[0]) || ladder[0] <= rat(0) {
        return Err(Error::Config("ladder needs at least two increasing positive rungs".into()));
    }
    Ok(())
}

/// `Q_nu(x; l(t), N)` with `l_i + 1 = -p_i t`, `l_{d+1} + 1 = -(1-|p|) t`,
/// against `K_nu(x; p, N) prod_j (-p_j / (1 - p_1 - ... - p_j))^{nu_j}`.
pub fn scan_hahn_to_krawtchouk(p: &[Rational], n: u32, probes: &[(Vec<u32>, Vec<u32>)], ladder: &[Rational]) -> Result<LimitScan> {
    FamilyParams::Krawtchouk { p: p.to_vec(), n }.validate()?;
    check_ladder(ladder)?;
    let rest = rat(1) - p.iter().sum::<Rational>();
    let mut factors = Vec::new();
    let mut prefix = rat(0);
    for pj in p {
        prefix += pj;
        factors.push(-pj.clone() / (rat(1) - &prefix));
    }
    let results = probes
        .iter()
        .map(|(nu, x)| {
            if nu.len() != p.len() || x.len() != p.len() {
                return Err(Error::WrongDimension { expected: p.len(), got: nu.len().max(x.len()) });
            }
            let mut target = krawtchouk_multi(p, n, nu, x)?;
            for (f, &k) in factors.iter().zip(nu) {
                for _ in 0..k {
                    target *= f;
                }
            }
            let errs = ladder
                .par_iter()
                .map(|t| {
                    let mut ell: Vec<Rational> = p.iter().map(|pi| -pi * t - rat(1)).collect();
                    ell.push(-&rest * t - rat(1));
                    Ok(HahnParams::new(ell, n)?.eval(nu, x)? - &target)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(probe_result(format!("nu={nu:?} x={x:?}"), ladder, &errs, 1.0, 0.25))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("hahn-krawtchouk", "t", ladder, 1.0, 0.25, results, Vec::new()))
}

/// `K_nu(x; a/N, N)` against `C_nu(x; a)`.
pub fn scan_krawtchouk_to_charlier(a: &[Rational], probes: &[(Vec<u32>, Vec<u32>)], ladder: &[Rational]) -> Result<LimitScan> {
    FamilyParams::Charlier { a: a.to_vec() }.validate()?;
    check_ladder(ladder)?;
    let a_total: Rational = a.iter().sum();
    let reach = probes.iter().map(|(_, x)| x.iter().sum::<u32>()).max().unwrap_or(0);
    if let Some(bad) = ladder.iter().find(|nn| !nn.is_integer() || **nn <= a_total || **nn < rat(reach as i64)) {
        return Err(Error::Config(format!("rung N = {bad} must be an integer above |a| = {a_total} and at least {reach}")));
    }
    let results = probes
        .iter()
        .map(|(nu, x)| {
            if nu.len() != a.len() || x.len() != a.len() {
                return Err(Error::WrongDimension { expected: a.len(), got: nu.len().max(x.len()) });
            }
            let xr: Vec<Rational> = x.iter().map(|&v| rat(v as i64)).collect();
            let target = charlier_multi(a, nu, &xr)?;
            let errs = ladder
                .par_iter()
                .map(|nn| {
                    let p: Vec<Rational> = a.iter().map(|ai| ai / nn).collect();
                    Ok(krawtchouk_multi_generic(&p, nn, nu, x)? - &target)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(probe_result(format!("nu={nu:?} x={x:?}"), ladder, &errs, 1.0, 0.25))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("krawtchouk-charlier", "N", ladder, 1.0, 0.25, results, Vec::new()))
}

/// `(2a)^{n/2} C_n(sqrt(2a) t + a; a)` against `(-1)^n H_n(t)`; every rung
/// must make `2a` a rational square.
pub fn scan_charlier_to_hermite(probes: &[(u32, Rational)], ladder: &[Rational]) -> Result<LimitScan> {
    check_ladder(ladder)?;
    let roots = ladder
        .iter()
        .map(|a| {
            crate::operators::rational_sqrt(&(a * rat(2)))
                .ok_or_else(|| Error::Config(format!("2a must be a rational square, got a = {a}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = probes
        .iter()
        .map(|(n, t)| {
            let sign = if n % 2 == 0 { rat(1) } else { rat(-1) };
            let target = sign * hermite_1d(*n, t);
            let errs = ladder
                .par_iter()
                .zip(&roots)
                .map(|(a, r)| {
                    let scale = (0..*n).fold(rat(1), |acc, _| acc * r);
                    Ok(scale * charlier_1d(*n, a, &(r * t + a))? - &target)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(probe_result(format!("n={n} t={t}"), ladder, &errs, 0.5, 0.15))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("charlier-hermite", "a", ladder, 0.5, 0.15, results, Vec::new()))
}

/// A probe polynomial in `y` for the continuum scan.
#[derive(Clone, Debug)]
pub struct JacobiProbe {
    pub name: String,
    pub poly: Poly,
}

/// `1`, `y_1` and `y_1 y_2` in `d` variables (`d >= 2`).
pub fn default_jacobi_probes(d: usize) -> Vec<JacobiProbe> {
    let y = |i| Poly::var(d, i);
    vec![
        JacobiProbe { name: "1".into(), poly: Poly::one(d) },
        JacobiProbe { name: "y1".into(), poly: y(0) },
        JacobiProbe { name: "y1*y2".into(), poly: y(0).mul(&y(1)) },
    ]
}

/// `sum_k y_k(1-y_k) ∂_kk - 2 sum_{k<j} y_k y_j ∂_kj + sum_k (|l| y_k - l_k) ∂_k`.
pub fn jacobi_apply(ell: &[Rational], p: &Poly) -> Poly {
    let d = ell.len() - 1;
    let total: Rational = ell.iter().sum();
    let y = |k: usize| Poly::var(d, k);
    let e = |ks: &[usize]| {
        let mut a = vec![0u32; d];
        for &k in ks {
            a[k] += 1;
        }
        a
    };
    let mut out = Poly::zero(d);
    for (k, ell_k) in ell.iter().enumerate().take(d) {
        let diff = y(k).mul(&Poly::one(d).sub(&y(k)));
        out = out.add(&diff.mul(&p.derivative(&e(&[k, k]))));
        for j in k + 1..d {
            out = out.sub(&y(k).mul(&y(j)).scale(&rat(2)).mul(&p.derivative(&e(&[k, j]))));
        }
        let drift = y(k).scale(&total).sub(&Poly::constant(d, ell_k.clone()));
        out = out.add(&drift.mul(&p.derivative(&e(&[k]))));
    }
    out
}

/// Discrete operator `sum L_{i,j}` with fixed `l` applied to `p(x/N)` at
/// `x = N y`, against the Jacobi operator applied to `p` at `y`; the error
/// per rung is the maximum over `points`. Rungs must make `N y` integral.
pub fn scan_operator_to_jacobi(ell: &[Rational], probes: &[JacobiProbe], points: &[Vec<Rational>], ladder: &[Rational]) -> Result<LimitScan> {
    check_ladder(ladder)?;
    let d = ell.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| Error::OutOfRange("need at least two entries in l".into()))?;
    if let Some(pt) = points.iter().find(|pt| pt.len() != d) {
        return Err(Error::WrongDimension { expected: d, got: pt.len() });
    }
    for nn in ladder {
        if points.iter().flatten().any(|v| !(v * nn).is_integer()) {
            return Err(Error::Config(format!("N = {nn} does not place every probe point on the lattice")));
        }
    }
    let results = probes
        .iter()
        .map(|probe| {
            let target = jacobi_apply(ell, &probe.poly);
            let errs = ladder
                .par_iter()
                .map(|nn| {
                    let fam = PolyFamily::Hahn { ell: ell.to_vec(), n: nn.clone() };
                    let scaled = rescale(&probe.poly, &nn.recip());
                    let image = fam.full()?.apply(&scaled);
                    let mut worst = rat(0);
                    for y in points {
                        let x: Vec<Rational> = y.iter().map(|v| v * nn).collect();
                        let err = image.eval(&x) - target.eval(y);
                        let err = if err < rat(0) { -err } else { err };
                        if err > worst {
                            worst = err;
                        }
                    }
                    Ok(worst)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(probe_result(probe.name.clone(), ladder, &errs, 1.0, 0.25))
        })
        .collect::<Result<Vec<_>>>()?;
    let notes = vec!["drift coefficient read as |l| y_k - l_k".to_string()];
    Ok(finish("operator-jacobi", "N", ladder, 1.0, 0.25, results, notes))
}

/// `p(c x)`.
fn rescale(p: &Poly, c: &Rational) -> Poly {
    let d = p.nvars();
    let mut out = Poly::zero(d);
    for (e, v) in p.terms() {
        let k: u32 = e.iter().sum();
        let f = (0..k).fold(v.clone(), |acc, _| acc * c);
        out.add_term(e.clone(), f);
    }
    out
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// The scan with its default parameters, ladder and probes.
pub fn default_scan(name: &str) -> Result<LimitScan> {
    scan_with(name, None, None, None)
}

/// Runs a named scan; `a` overrides the Charlier parameter (krawtchouk-charlier),
/// `n` selects a single degree (charlier-hermite), `ladder` overrides rungs.
pub fn scan_with(name: &str, a: Option<&[Rational]>, n: Option<u32>, ladder: Option<&[Rational]>) -> Result<LimitScan> {
    match name {
        "hahn-krawtchouk" => {
            let p = [ratio(1, 3), ratio(1, 3)];
            let probes = vec![
                (vec![0, 0], vec![1, 1]),
                (vec![1, 0], vec![1, 1]),
                (vec![2, 0], vec![1, 1]),
                (vec![1, 1], vec![1, 2]),
                (vec![0, 2], vec![1, 1]),
                (vec![2, 1], vec![0, 3]),
            ];
            let default = ints(&[64, 128, 256, 512]);
            scan_hahn_to_krawtchouk(&p, 4, &probes, ladder.unwrap_or(&default))
        }
        "krawtchouk-charlier" => {
            let default = ints(&[16, 32, 64, 128]);
            let a = a.map(<[Rational]>::to_vec).unwrap_or_else(|| vec![rat(1), rat(2)]);
            let probes: Vec<(Vec<u32>, Vec<u32>)> = match a.len() {
                1 => vec![(vec![2], vec![3]), (vec![3], vec![2]), (vec![2], vec![5])],
                2 => vec![(vec![2, 1], vec![3, 2]), (vec![1, 2], vec![2, 3]), (vec![2, 0], vec![3, 1])],
                d => vec![(vec![0; d], vec![1; d]), (vec![1; d], vec![2; d])],
            };
            scan_krawtchouk_to_charlier(&a, &probes, ladder.unwrap_or(&default))
        }
        "charlier-hermite" => {
            let default = ints(&[32, 128, 512, 2048]);
            let probes: Vec<(u32, Rational)> = match n {
                Some(n) => vec![(n, rat(1)), (n, ratio(1, 2))],
                None => vec![(0, rat(1)), (1, rat(1)), (2, rat(1)), (3, ratio(1, 2))],
            };
            scan_charlier_to_hermite(&probes, ladder.unwrap_or(&default))
        }
        "operator-jacobi" => {
            let default = ints(&[16, 32, 64, 128]);
            let ell = ints(&[3, 3, 3]);
            let points = vec![vec![ratio(1, 4), ratio(1, 4)], vec![ratio(1, 2), ratio(1, 4)], vec![ratio(1, 4), ratio(1, 2)]];
            scan_operator_to_jacobi(&ell, &default_jacobi_probes(2), &points, ladder.unwrap_or(&default))
        }
        other => Err(Error::Config(format!("unknown scan {other:?}; expected one of {}", SCAN_NAMES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scans_converge() {
        for name in SCAN_NAMES {
            let scan = default_scan(name).unwrap();
            for p in &scan.probes {
                assert!(p.passes, "{name} {p:?}");
            }
            assert!(scan.passes);
        }
    }

    #[test]
    fn trivial_probes_are_exact() {
        let s = scan_with("charlier-hermite", None, Some(1), None).unwrap();
        assert!(s.probes.iter().all(|p| p.exact_zero));
        let s = default_scan("operator-jacobi").unwrap();
        assert!(s.probes[0].exact_zero && s.probes[1].exact_zero);
        assert!(!s.probes[2].exact_zero);
        let s = default_scan("hahn-krawtchouk").unwrap();
        // degree one is matched exactly by the normalized limit
        assert!(s.probes[0].exact_zero && s.probes[1].exact_zero);
        let o = s.probes[3].fitted_order.unwrap();
        assert!((o - 1.0).abs() < 0.1, "{o}");
    }

    #[test]
    fn one_variable_krawtchouk_order() {
        let s = scan_with("krawtchouk-charlier", Some(&[rat(2)]), None, Some(&ints(&[16, 32, 64, 128]))).unwrap();
        assert!(s.passes);
        for p in &s.probes {
            let o = p.fitted_order.unwrap();
            assert!((o - 1.0).abs() < 0.1, "{o}");
        }
        // first degree, and any degree at x = 1, agree exactly: 1 - n/a
        let probes = vec![(vec![1], vec![5]), (vec![4], vec![1])];
        let s = scan_krawtchouk_to_charlier(&[rat(2)], &probes, &ints(&[16, 32])).unwrap();
        assert!(s.probes.iter().all(|p| p.exact_zero));
        assert!(scan_krawtchouk_to_charlier(&[rat(2)], &probes, &ints(&[2, 8])).is_err());
    }

    #[test]
    fn bad_configurations() {
        assert!(matches!(default_scan("nope"), Err(Error::Config(_))));
        assert!(scan_with("charlier-hermite", None, None, Some(&ints(&[3, 5]))).is_err());
        assert!(scan_with("operator-jacobi", None, None, Some(&ints(&[6, 10]))).is_err());
        assert!(scan_with("hahn-krawtchouk", None, None, Some(&ints(&[10]))).is_err());
    }

    #[test]
    fn csv_has_row_per_rung() {
        let s = default_scan("charlier-hermite").unwrap();
        assert_eq!(s.to_csv().lines().count(), 1 + s.probes.len() * s.ladder.len());
    }
}
