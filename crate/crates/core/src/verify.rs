//! Verification suites over single specs or seeded sweeps, producing
//! serializable reports with the first counterexample of each section.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::domains::{
    admissible_specs, check_admissible, count_h, count_v, count_v_formula, enumerate_v, ideal_generators_vanish, verify_counting_lemmas, verify_shuffle,
    weight, weight_homogeneous, DomainSpec,
};
use crate::error::{Error, Result};
use crate::exact::{rat, Rational, RationalString};
use crate::operators::{
    generating_sets_lattice, generator_relation_realized, kohno_drinfeld_realized, relation_tuples, verify_meixner_decomposition, verify_self_adjoint,
    LatticeOperators, OperatorFamily, Realized, RelationReport,
};
use crate::spectra::{gram_basis, interpolation_rank, verify_spectra_with, Basis, RANK_BOUND};

pub const SCHEMA: &str = "polyhahn/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Orthogonality,
    Spectra,
    KohnoDrinfeld,
    GeneratorRelation,
    GeneratingSets,
    Counting,
    Shuffle,
    SelfAdjoint,
    Ideal,
    MeixnerDecomp,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Orthogonality,
        Suite::Spectra,
        Suite::KohnoDrinfeld,
        Suite::GeneratorRelation,
        Suite::GeneratingSets,
        Suite::Counting,
        Suite::Shuffle,
        Suite::SelfAdjoint,
        Suite::Ideal,
        Suite::MeixnerDecomp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Orthogonality => "orthogonality",
            Suite::Spectra => "spectra",
            Suite::KohnoDrinfeld => "kohno-drinfeld",
            Suite::GeneratorRelation => "generator-relation",
            Suite::GeneratingSets => "generating-sets",
            Suite::Counting => "counting",
            Suite::Shuffle => "shuffle",
            Suite::SelfAdjoint => "self-adjoint",
            Suite::Ideal => "ideal",
            Suite::MeixnerDecomp => "meixner-decomp",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// `d=A..B` or `d=A`, `N<=M`, optional `samples=K` (comma separated).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sweep {
    pub d_min: usize,
    pub d_max: usize,
    pub n_max: u32,
    /// `None`: every admissible spec; `Some(k)`: `k` seeded uniform samples.
    pub samples: Option<usize>,
}

impl FromStr for Sweep {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sweep> {
        let bad = |m: &str| Error::Config(format!("sweep {s:?}: {m}"));
        let (mut d, mut n, mut samples) = (None, None, None);
        for part in s.split(',').map(str::trim) {
            if let Some(v) = part.strip_prefix("d=") {
                let (lo, hi) = match v.split_once("..") {
                    Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
                    None => (v, v),
                };
                let p = |x: &str| x.parse::<usize>().map_err(|_| bad("bad d"));
                d = Some((p(lo)?, p(hi)?));
            } else if let Some(v) = part.strip_prefix("N<=") {
                n = Some(v.parse::<u32>().map_err(|_| bad("bad N bound"))?);
            } else if let Some(v) = part.strip_prefix("samples=") {
                samples = Some(v.parse::<usize>().map_err(|_| bad("bad sample count"))?);
            } else {
                return Err(bad(&format!("unrecognized term {part:?}")));
            }
        }
        let (d_min, d_max) = d.ok_or_else(|| bad("missing d"))?;
        let n_max = n.ok_or_else(|| bad("missing N bound"))?;
        if d_min == 0 || d_min > d_max || n_max == 0 {
            return Err(bad("empty range"));
        }
        Ok(Sweep { d_min, d_max, n_max, samples })
    }
}

/// Uniform sample over admissible `(N, l)` for fixed `d`, `N <= n_max`:
/// `N` drawn with weight `N^{d+1}`, `l` uniform in `[1, N]^{d+1}`, whole draw
/// rejected until admissible.
pub fn sample_spec(rng: &mut ChaCha8Rng, d: usize, n_max: u32) -> DomainSpec {
    let weights: Vec<f64> = (1..=n_max).map(|n| (n as f64).powi(d as i32 + 1)).collect();
    let total: f64 = weights.iter().sum();
    loop {
        let mut u = rng.gen::<f64>() * total;
        let mut n = n_max;
        for (k, w) in weights.iter().enumerate() {
            if u < *w {
                n = k as u32 + 1;
                break;
            }
            u -= w;
        }
        let ell: Vec<u32> = (0..=d).map(|_| rng.gen_range(1..=n)).collect();
        if let Ok(spec) = check_admissible(d, n, &ell) {
            return spec;
        }
    }
}

impl Sweep {
    /// Specs in a deterministic order; sampled sweeps depend only on `seed`.
    pub fn specs(&self, seed: u64) -> Vec<DomainSpec> {
        match self.samples {
            None => (self.d_min..=self.d_max)
                .flat_map(|d| (1..=self.n_max).flat_map(move |n| admissible_specs(d, n)))
                .collect(),
            Some(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let span = self.d_max - self.d_min + 1;
                (0..k)
                    .map(|_| {
                        let d = self.d_min + rng.gen_range(0..span);
                        sample_spec(&mut rng, d, self.n_max)
                    })
                    .collect()
            }
        }
    }
}

/// Outcome of one suite on one subject.
#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub suite: Suite,
    pub subject: String,
    /// `None` when the suite does not apply (recorded, not counted as failure).
    pub passed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub checks: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Value>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub suite: Suite,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    pub degree: u32,
    pub sections: Vec<Section>,
    pub passed: bool,
}

/// What a suite runs against.
#[derive(Clone, Debug)]
pub enum Subject {
    Spec(DomainSpec),
    Family(OperatorFamily),
}

impl Subject {
    fn label(&self) -> String {
        match self {
            Subject::Spec(s) => format!("d={} N={} l={:?}", s.d(), s.n(), s.ell()),
            Subject::Family(f) => format!("{} d={}", f.name(), f.d()),
        }
    }
}

fn section(suite: Suite, subject: &Subject) -> Section {
    Section { suite, subject: subject.label(), passed: Some(true), skipped: None, checks: 0, first_failure: None, detail: Value::Null }
}

fn skipped(suite: Suite, subject: &Subject, why: &str) -> Section {
    Section { passed: None, skipped: Some(why.into()), ..section(suite, subject) }
}

fn from_relations(suite: Suite, subject: &Subject, rep: &RelationReport) -> Section {
    let mut s = section(suite, subject);
    s.checks = rep.checks.len() as u64;
    s.passed = Some(rep.holds());
    s.first_failure = rep.failures().next().map(|c| serde_json::to_value(c).expect("serializable"));
    s.detail = json!({ "family": rep.family, "bounded_degree": rep.bounded_degree });
    s
}

fn fail_value<T: Serialize>(v: &T) -> Option<Value> {
    Some(serde_json::to_value(v).expect("serializable"))
}

/// Default Meixner parameters for dimension `d`: `s = 2`, `c_i = 1/(d+1+i)`.
pub fn default_meixner(d: usize) -> OperatorFamily {
    OperatorFamily::Meixner { s: rat(2), c: (1..=d).map(|i| Rational::new(1.into(), ((d + 1 + i) as i64).into())).collect() }
}

/// Runs one suite (never `All`) on one subject. Inapplicable combinations
/// are skipped when `lenient`, configuration errors otherwise.
pub fn run_suite(suite: Suite, subject: &Subject, degree: u32, lenient: bool) -> Result<Section> {
    let need = |ok: bool, why: &str| -> Result<Option<Section>> {
        if ok {
            Ok(None)
        } else if lenient {
            Ok(Some(skipped(suite, subject, why)))
        } else {
            Err(Error::Config(format!("suite {suite} {why}")))
        }
    };
    match (suite, subject) {
        (Suite::All, _) => Err(Error::Config("expand `all` before running".into())),
        (Suite::Orthogonality, Subject::Spec(spec)) => {
            let mut s = section(suite, subject);
            let dom = enumerate_v(spec);
            let w: Vec<Rational> = dom.points().iter().map(|x| weight(spec, x)).collect::<Result<_>>()?;
            let total: Rational = w.iter().sum();
            let positive = w.iter().all(|v| *v > rat(0));
            s.checks += 2;
            if total != rat(1) || !positive {
                s.passed = Some(false);
                s.first_failure = Some(json!({ "weight_total": RationalString(total), "positive": positive }));
                return Ok(s);
            }
            let mut diag = Value::Null;
            for basis in [Basis::Standard, Basis::Forward, Basis::Backward] {
                let g = gram_basis(spec, basis)?.summary()?;
                s.checks += (g.indices.len() * g.indices.len()) as u64;
                if basis == Basis::Standard {
                    diag = json!(g.diagonal);
                }
                if !g.exact {
                    s.passed = Some(false);
                    s.first_failure = fail_value(&g);
                    return Ok(s);
                }
            }
            s.detail = json!({ "diagonal": diag });
            Ok(s)
        }
        (Suite::Spectra, Subject::Spec(spec)) => {
            let ops = LatticeOperators::hahn(spec)?;
            let mut s = section(suite, subject);
            let mut standard = Value::Null;
            for basis in [Basis::Standard, Basis::Forward, Basis::Backward] {
                let rep = verify_spectra_with(&ops, basis)?;
                s.checks += (rep.eigenvalues.len() * spec.d()) as u64;
                if basis == Basis::Standard {
                    standard = json!({
                        "eigenvalues": rep.eigenvalues.iter().map(|e| json!({"nu": e.nu, "lambda": e.lambda})).collect::<Vec<_>>(),
                        "collisions": rep.collisions,
                    });
                }
                if let Some(bad) = rep.eigenvalues.iter().find(|e| !e.exact) {
                    s.passed = Some(false);
                    s.first_failure = Some(json!({ "basis": basis, "nu": bad.nu, "lambda": bad.lambda }));
                    break;
                }
            }
            s.detail = standard;
            Ok(s)
        }
        (Suite::KohnoDrinfeld, _) => {
            let r = realize(subject, degree)?;
            Ok(from_relations(suite, subject, &kohno_drinfeld_realized(&r)?))
        }
        (Suite::GeneratorRelation, _) => {
            let r = realize(subject, degree)?;
            if let Some(sk) = need(r.d() >= 3, "needs d >= 3")? {
                return Ok(sk);
            }
            let boundary = r.has_boundary_pairs();
            let mut rep: Option<RelationReport> = None;
            for t in relation_tuples(r.d(), boundary) {
                let part = generator_relation_realized(&r, t)?;
                match rep.as_mut() {
                    Some(acc) => acc.checks.extend(part.checks),
                    None => rep = Some(part),
                }
            }
            Ok(from_relations(suite, subject, &rep.expect("at least one tuple")))
        }
        (Suite::GeneratingSets, Subject::Spec(spec)) => {
            if let Some(sk) = need(spec.d() >= 3, "needs d >= 3")? {
                return Ok(sk);
            }
            let ops = LatticeOperators::hahn(spec)?;
            Ok(from_relations(suite, subject, &generating_sets_lattice(&ops)?))
        }
        (Suite::SelfAdjoint, _) => {
            let ops = match subject {
                Subject::Spec(spec) => LatticeOperators::hahn(spec)?,
                Subject::Family(OperatorFamily::Krawtchouk { p, n }) => LatticeOperators::krawtchouk(p, *n)?,
                Subject::Family(_) => {
                    return need(false, "needs a finite-lattice family").map(|s| s.expect("lenient"));
                }
            };
            Ok(from_relations(suite, subject, &verify_self_adjoint(&ops)?))
        }
        (Suite::Counting, Subject::Spec(spec)) => {
            let mut s = section(suite, subject);
            let (v, h, f) = (count_v(spec), count_h(spec), count_v_formula(spec));
            s.checks = 1;
            let mut ok = v == h && f == v.into();
            let mut detail = json!({ "V": v.to_string(), "H": h.to_string(), "formula": f.to_string() });
            if spec.d() >= 3 {
                let lem = verify_counting_lemmas(spec.d(), spec.n(), spec.ell())?;
                s.checks += lem.instances() as u64;
                ok &= lem.holds();
                detail["lemma_instances"] = json!(lem.instances().to_string());
                if !lem.holds() {
                    s.first_failure = fail_value(&lem);
                }
            }
            if !(v == h && f == v.into()) {
                s.first_failure = Some(detail.clone());
            }
            s.passed = Some(ok);
            s.detail = detail;
            Ok(s)
        }
        (Suite::Shuffle, Subject::Spec(spec)) => {
            if let Some(sk) = need(spec.d() == 2, "needs d = 2")? {
                return Ok(sk);
            }
            let rep = verify_shuffle(spec)?;
            let mut s = section(suite, subject);
            s.checks = 3;
            s.passed = Some(rep.holds());
            if !rep.holds() {
                s.first_failure = fail_value(&rep);
            }
            s.detail = serde_json::to_value(&rep).expect("serializable");
            Ok(s)
        }
        (Suite::Ideal, Subject::Spec(spec)) => {
            let mut s = section(suite, subject);
            let vanish = ideal_generators_vanish(spec);
            s.checks = 1;
            let mut detail = json!({ "generators_vanish": vanish });
            let mut ok = vanish;
            let size = count_v(spec) as usize;
            if size <= RANK_BOUND {
                let rank = interpolation_rank(spec)?;
                s.checks += 1;
                ok &= rank == size;
                detail["rank"] = json!(rank.to_string());
                detail["V"] = json!(size.to_string());
            } else {
                detail["rank"] = json!(format!("skipped: |V| = {size} exceeds {RANK_BOUND}"));
            }
            if !ok {
                s.first_failure = Some(detail.clone());
            }
            s.passed = Some(ok);
            s.detail = detail;
            Ok(s)
        }
        (Suite::MeixnerDecomp, _) => {
            let fam = match subject {
                Subject::Family(f @ OperatorFamily::Meixner { .. }) => f.clone(),
                Subject::Spec(spec) => default_meixner(spec.d()),
                Subject::Family(f) => default_meixner(f.d()),
            };
            let OperatorFamily::Meixner { s: sp, c } = &fam else { unreachable!() };
            let rep = verify_meixner_decomposition(sp, c, degree)?;
            let mut s = from_relations(suite, subject, &rep);
            s.detail["s"] = json!(RationalString(sp.clone()));
            s.detail["c"] = json!(c.iter().cloned().map(RationalString).collect::<Vec<_>>());
            Ok(s)
        }
        (_, Subject::Family(_)) => need(false, "needs a lattice spec").map(|s| s.expect("lenient")),
    }
}

fn realize(subject: &Subject, degree: u32) -> Result<Realized> {
    match subject {
        Subject::Spec(spec) => OperatorFamily::Hahn(spec.clone()).realize(degree),
        Subject::Family(f) => f.realize(degree),
    }
}

/// Weight invariance under permutations of homogeneous coordinates for
/// `count` seeded random permutations.
pub fn weight_permutation_invariance(spec: &DomainSpec, count: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d1 = spec.d() + 1;
    let dom = enumerate_v(spec);
    for _ in 0..count {
        let mut perm: Vec<usize> = (0..d1).collect();
        for i in (1..d1).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let ell: Vec<u32> = perm.iter().map(|&p| spec.ell()[p]).collect();
        for x in dom.points() {
            let xh = spec.homogeneous(x);
            let px: Vec<u32> = perm.iter().map(|&p| xh[p] as u32).collect();
            if weight_homogeneous(&ell, spec.n(), &px)? != weight(spec, x)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Runs `suite` over the subjects. `All` expands to every suite and skips
/// the ones that do not apply to a subject.
pub fn run(suite: Suite, subjects: &[Subject], degree: u32, seed: Option<u64>, sweep: Option<Sweep>) -> Result<VerifyReport> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let lenient = suite == Suite::All || sweep.is_some();
    let mut sections = Vec::new();
    for subject in subjects {
        for &s in &suites {
            sections.push(run_suite(s, subject, degree, lenient)?);
        }
    }
    let passed = sections.iter().all(|s| s.passed != Some(false));
    Ok(VerifyReport { schema: SCHEMA, suite, seed, sweep, degree, sections, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "d=2..4,N<=8".parse().unwrap();
        assert_eq!(s, Sweep { d_min: 2, d_max: 4, n_max: 8, samples: None });
        let s: Sweep = "d=3, N<=5, samples=10".parse().unwrap();
        assert_eq!(s.samples, Some(10));
        assert!("d=4..2,N<=3".parse::<Sweep>().is_err());
        assert!("N<=3".parse::<Sweep>().is_err());
        assert!("d=2,N<=3,x=1".parse::<Sweep>().is_err());
    }

    #[test]
    fn sampled_sweeps_are_reproducible_and_admissible() {
        let s: Sweep = "d=4..5,N<=9,samples=30".parse().unwrap();
        let a = s.specs(11);
        assert_eq!(a, s.specs(11));
        assert_ne!(a, s.specs(12));
        for spec in &a {
            assert!(check_admissible(spec.d(), spec.n(), spec.ell()).is_ok());
            assert!((4..=5).contains(&spec.d()) && spec.n() <= 9);
        }
    }

    #[test]
    fn all_suites_on_hexagon() {
        let spec = check_admissible(2, 3, &[2, 2, 2]).unwrap();
        let rep = run(Suite::All, &[Subject::Spec(spec.clone())], 4, None, None).unwrap();
        assert!(rep.passed, "{:#?}", rep.sections.iter().filter(|s| s.passed == Some(false)).collect::<Vec<_>>());
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"schema\":\"polyhahn/1\""));
        assert!(run(Suite::GeneratingSets, &[Subject::Spec(spec)], 4, None, None).is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn permutation_invariance() {
        let spec = check_admissible(3, 5, &[3, 4, 2, 5]).unwrap();
        assert!(weight_permutation_invariance(&spec, 20, 1).unwrap());
    }
}
