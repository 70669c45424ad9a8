//! Plain-Rust surface behind the Python module. Rationals cross the
//! boundary as `"p/q"` strings; reports as JSON text.

use polyhahn::domains::{check_admissible, count_v, enumerate_h, enumerate_v, heights_h, heights_v, weight as lattice_weight, DomainSpec};
use polyhahn::families::{hahn_multi, norm_b};
use polyhahn::limits::default_scan;
use polyhahn::verify::{run, Subject, Suite};
use polyhahn::Result;

pub fn spec(d: usize, n: u32, ell: &[u32]) -> Result<DomainSpec> {
    check_admissible(d, n, ell)
}

pub fn size(s: &DomainSpec) -> u64 {
    count_v(s)
}

pub fn points(s: &DomainSpec) -> Vec<Vec<u32>> {
    enumerate_v(s).points().iter().map(|p| p.0.clone()).collect()
}

pub fn indices(s: &DomainSpec) -> Vec<Vec<u32>> {
    enumerate_h(s).indices().iter().map(|p| p.0.clone()).collect()
}

pub fn weight(s: &DomainSpec, x: &[u32]) -> Result<String> {
    Ok(lattice_weight(s, x)?.to_string())
}

pub fn hahn(s: &DomainSpec, nu: &[u32], x: &[u32]) -> Result<String> {
    Ok(hahn_multi(s, nu, x)?.to_string())
}

pub fn norm(s: &DomainSpec, nu: &[u32]) -> Result<String> {
    Ok(norm_b(s, nu)?.to_string())
}

/// `(v, h)` column heights for `d = 2`.
pub fn heights(s: &DomainSpec) -> Result<(Vec<u32>, Vec<u32>)> {
    Ok((heights_v(s)?, heights_h(s)?))
}

/// `(passed, report_json)` for one suite on one spec.
pub fn verify(suite: &str, s: &DomainSpec, degree: u32) -> Result<(bool, String)> {
    let suite: Suite = suite.parse()?;
    let report = run(suite, &[Subject::Spec(s.clone())], degree, None, None)?;
    Ok((report.passed, serde_json::to_string(&report).expect("reports serialize")))
}

/// `(passes, scan_json)` for a named scan with default parameters.
pub fn limit_scan(name: &str) -> Result<(bool, String)> {
    let scan = default_scan(name)?;
    Ok((scan.passes, serde_json::to_string(&scan).expect("reports serialize")))
}
