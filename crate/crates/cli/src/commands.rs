use polyhahn::domains::{
    check_admissible, count_v, enumerate_h, enumerate_v, projection_heights_d3, verify_shuffle, DomainSpec,
};
use polyhahn::error::{Error, Result};
use polyhahn::exact::{MultiIndex, Rational};
use polyhahn::limits::scan_with;
use polyhahn::operators::{export_triplets, LatticeOperators, OperatorFamily};
use polyhahn::spectra::{gram_basis, lattice_vector, Basis};
use polyhahn::verify::{self, Subject, Suite, Sweep, SCHEMA};
use serde_json::{json, Value};

use crate::output::{csv_table, json, Format, Rendered};

/// `-d`, `-N`, `--ell` as given on the command line.
#[derive(Clone, Debug, Default)]
pub struct SpecInput {
    pub d: Option<usize>,
    pub n: Option<u32>,
    pub ell: Option<Vec<u32>>,
}

impl SpecInput {
    /// Missing `--ell` means the full simplex; missing `-d` is read off `--ell`.
    pub fn resolve(&self) -> Result<DomainSpec> {
        let n = self.n.ok_or_else(|| Error::Config("-N is required".into()))?;
        let d = match (self.d, &self.ell) {
            (Some(d), _) => d,
            (None, Some(ell)) if !ell.is_empty() => ell.len() - 1,
            _ => return Err(Error::Config("-d or --ell is required".into())),
        };
        match &self.ell {
            Some(ell) => check_admissible(d, n, ell),
            None => DomainSpec::simplex(d, n),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct FamilyInput {
    pub family: Option<String>,
    pub p: Option<Vec<Rational>>,
    pub s: Option<Rational>,
    pub c: Option<Vec<Rational>>,
    pub a: Option<Vec<Rational>>,
}

fn required<T: Clone>(v: &Option<T>, flag: &str, family: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Config(format!("family {family} needs {flag}")))
}

/// Resolves the operator family; `hahn` (the default) uses the domain flags.
pub fn family(spec: &SpecInput, fam: &FamilyInput) -> Result<OperatorFamily> {
    let name = fam.family.as_deref().unwrap_or("hahn");
    let family = match name {
        "hahn" => OperatorFamily::Hahn(spec.resolve()?),
        "krawtchouk" => {
            let n = spec.n.ok_or_else(|| Error::Config("family krawtchouk needs -N".into()))?;
            polyhahn::operators::krawtchouk_family(&required(&fam.p, "--p", name)?, n)?
        }
        "meixner" => OperatorFamily::Meixner { s: required(&fam.s, "--s", name)?, c: required(&fam.c, "--c", name)? },
        "charlier" => OperatorFamily::Charlier { a: required(&fam.a, "--a", name)? },
        "oscillator" | "gauged-oscillator" => {
            let d = spec.d.ok_or_else(|| Error::Config(format!("family {name} needs -d")))?;
            if name == "oscillator" {
                OperatorFamily::Oscillator { d }
            } else {
                OperatorFamily::GaugedOscillator { d }
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown family {other:?}; expected hahn, krawtchouk, meixner, charlier, oscillator, gauged-oscillator"
            )))
        }
    };
    if let OperatorFamily::Meixner { .. } | OperatorFamily::Charlier { .. } = &family {
        family.realize(0)?;
    }
    Ok(family)
}

fn spec_json(spec: &DomainSpec) -> Value {
    json!({ "d": spec.d(), "N": spec.n(), "ell": spec.ell() })
}

fn coord_header(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("{prefix}{i}")).collect()
}

fn cells(x: &[u32]) -> Vec<String> {
    x.iter().map(u32::to_string).collect()
}

fn nu_label(nu: &[u32]) -> String {
    format!("({})", cells(nu).join(","))
}

pub fn domain(spec: &DomainSpec, format: Format) -> Rendered {
    let dom = enumerate_v(spec);
    let body = match format {
        Format::Json => {
            let points: Vec<&[u32]> = dom.points().iter().map(MultiIndex::as_slice).collect();
            json(&json!({
                "schema": SCHEMA, "d": spec.d(), "N": spec.n(), "ell": spec.ell(),
                "count": dom.len().to_string(), "points": points,
            }))
        }
        Format::Csv => csv_table(&coord_header("x", spec.d()), dom.points().iter().map(|x| cells(x))),
    };
    Rendered::new(body, true)
}

pub fn index(spec: &DomainSpec, format: Format) -> Rendered {
    let h = enumerate_h(spec);
    let body = match format {
        Format::Json => {
            let indices: Vec<&[u32]> = h.indices().iter().map(MultiIndex::as_slice).collect();
            json(&json!({
                "schema": SCHEMA, "d": spec.d(), "N": spec.n(), "ell": spec.ell(),
                "count": h.len().to_string(), "indices": indices,
            }))
        }
        Format::Csv => csv_table(&coord_header("nu", spec.d()), h.indices().iter().map(|nu| cells(nu))),
    };
    Rendered::new(body, true)
}

pub struct VerifyInput {
    pub suite: Suite,
    pub degree: u32,
    pub seed: u64,
    pub sweep: Option<Sweep>,
}

pub fn verify(input: &VerifyInput, spec: &SpecInput, fam: &FamilyInput, format: Format) -> Result<Rendered> {
    let (subjects, seed) = match &input.sweep {
        Some(sweep) => {
            if fam.family.as_deref().is_some_and(|f| f != "hahn") {
                return Err(Error::Config("--sweep ranges over Hahn domains; drop --family".into()));
            }
            (sweep.specs(input.seed).into_iter().map(Subject::Spec).collect(), Some(input.seed))
        }
        None => {
            let subject = match family(spec, fam)? {
                OperatorFamily::Hahn(s) => Subject::Spec(s),
                other => Subject::Family(other),
            };
            (vec![subject], None)
        }
    };
    let report = verify::run(input.suite, &subjects, input.degree, seed, input.sweep.clone())?;
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let header: Vec<String> = ["suite", "subject", "status", "checks", "first_failure"].map(String::from).to_vec();
            csv_table(
                &header,
                report.sections.iter().map(|s| {
                    let status = match s.passed {
                        Some(true) => "pass",
                        Some(false) => "fail",
                        None => "skipped",
                    };
                    let failure = s.first_failure.as_ref().map_or(String::new(), Value::to_string);
                    vec![s.suite.name().to_string(), s.subject.clone(), status.into(), s.checks.to_string(), failure]
                }),
            )
        }
    };
    Ok(Rendered::new(body, report.passed))
}

pub fn limits(name: &str, a: Option<&[Rational]>, n: Option<u32>, ladder: Option<&[Rational]>, format: Format) -> Result<Rendered> {
    let scan = scan_with(name, a, n, ladder)?;
    let body = match format {
        Format::Json => json(&json!({ "schema": SCHEMA, "scan": scan })),
        Format::Csv => scan.to_csv(),
    };
    Ok(Rendered::new(body, scan.passes))
}

/// Evaluation table: one row per point of `V`, one column per index.
pub fn eval(spec: &DomainSpec, basis: Basis, only: Option<&[u32]>, format: Format) -> Result<Rendered> {
    let dom = enumerate_v(spec);
    let pspec = basis.spec(spec);
    let indices: Vec<Vec<u32>> = match only {
        Some(nu) => vec![nu.to_vec()],
        None => enumerate_h(&pspec).indices().iter().map(|m| m.0.clone()).collect(),
    };
    let columns: Vec<Vec<Rational>> = indices.iter().map(|nu| lattice_vector(spec, &dom, basis, nu)).collect::<Result<_>>()?;
    let body = match format {
        Format::Json => {
            let values: Vec<Vec<String>> =
                (0..dom.len()).map(|r| columns.iter().map(|c| c[r].to_string()).collect()).collect();
            let points: Vec<&[u32]> = dom.points().iter().map(MultiIndex::as_slice).collect();
            json(&json!({
                "schema": SCHEMA, "spec": spec_json(spec), "basis": basis,
                "indices": indices, "points": points, "values": values,
            }))
        }
        Format::Csv => {
            let mut header = coord_header("x", spec.d());
            header.extend(indices.iter().map(|nu| nu_label(nu)));
            csv_table(
                &header,
                dom.points().iter().enumerate().map(|(r, x)| {
                    let mut row = cells(x);
                    row.extend(columns.iter().map(|c| c[r].to_string()));
                    row
                }),
            )
        }
    };
    Ok(Rendered::new(body, true))
}

pub fn gram(spec: &DomainSpec, basis: Basis, format: Format) -> Result<Rendered> {
    let g = gram_basis(spec, basis)?;
    let summary = g.summary()?;
    let body = match format {
        Format::Json => json(&json!({ "schema": SCHEMA, "gram": summary })),
        Format::Csv => {
            let mut header = vec!["nu".to_string()];
            header.extend(g.indices.iter().map(|nu| nu_label(nu)));
            csv_table(
                &header,
                g.indices.iter().zip(&g.entries).map(|(nu, row)| {
                    let mut out = vec![nu_label(nu)];
                    out.extend(row.iter().map(Rational::to_string));
                    out
                }),
            )
        }
    };
    Ok(Rendered::new(body, summary.exact))
}

/// Which lattice operator to export.
#[derive(Clone, Copy, Debug)]
pub enum OperatorChoice {
    Pair(usize, usize),
    Partial(usize),
    Full,
}

pub fn operator(spec: &SpecInput, fam: &FamilyInput, choice: OperatorChoice, format: Format) -> Result<Rendered> {
    let family = family(spec, fam)?;
    let ops = match &family {
        OperatorFamily::Hahn(s) => LatticeOperators::hahn(s)?,
        OperatorFamily::Krawtchouk { p, n } => LatticeOperators::krawtchouk(p, *n)?,
        other => {
            return Err(Error::Config(format!(
                "family {} acts on polynomials; only lattice families export matrices",
                other.name()
            )))
        }
    };
    let (matrix, indices) = match choice {
        OperatorChoice::Pair(i, j) => (ops.l(i, j)?.clone(), json!({ "pair": [i, j] })),
        OperatorChoice::Partial(k) => {
            if k == 0 || k > ops.d() {
                return Err(Error::Config(format!("partial sum index {k} outside 1..={}", ops.d())));
            }
            (ops.m(k), json!({ "partial": k }))
        }
        OperatorChoice::Full => (ops.full(), json!("full")),
    };
    let dom = ops.domain();
    let points: Vec<&[u32]> = dom.points().iter().map(MultiIndex::as_slice).collect();
    let params: Vec<String> = ops.params().iter().map(Rational::to_string).collect();
    let header = json!({
        "schema": SCHEMA,
        "family": family.name(),
        "params": params,
        "indices": indices,
        "domain": { "d": ops.d(), "N": dom.spec().n(), "size": dom.len().to_string(), "points": points },
    });
    let body = match format {
        Format::Csv => export_triplets(&matrix, &header),
        Format::Json => {
            let triplets: Vec<Value> = matrix.triplets().into_iter().map(|(r, c, v)| json!([r, c, v.to_string()])).collect();
            json(&json!({ "header": header, "triplets": triplets }))
        }
    };
    Ok(Rendered::new(body, true))
}

pub fn heights(spec: &DomainSpec, format: Format) -> Result<Rendered> {
    let rep = verify_shuffle(spec)?;
    let body = match format {
        Format::Json => json(&json!({ "schema": SCHEMA, "spec": spec_json(spec), "heights": rep })),
        Format::Csv => {
            let header: Vec<String> = ["nu1", "v", "h"].map(String::from).to_vec();
            csv_table(&header, rep.v.iter().zip(&rep.h).enumerate().map(|(i, (v, h))| vec![i.to_string(), v.to_string(), h.to_string()]))
        }
    };
    Ok(Rendered::new(body, rep.holds()))
}

/// Report-only: never fails on the outcome of the comparison.
pub fn experiment_d3(specs: &[DomainSpec], format: Format) -> Result<Rendered> {
    let mut rows = Vec::new();
    for spec in specs {
        rows.push((spec, projection_heights_d3(spec)?));
    }
    let equal = rows.iter().filter(|(_, r)| r.multisets_equal).count();
    let body = match format {
        Format::Json => {
            let runs: Vec<Value> = rows
                .iter()
                .map(|(s, r)| json!({ "spec": spec_json(s), "size": count_v(s).to_string(), "projection": r }))
                .collect();
            json(&json!({
                "schema": SCHEMA, "report_only": true, "specs": rows.len().to_string(),
                "multisets_equal": equal.to_string(), "runs": runs,
            }))
        }
        Format::Csv => {
            let header: Vec<String> = ["N", "ell", "size", "multisets_equal"].map(String::from).to_vec();
            csv_table(
                &header,
                rows.iter().map(|(s, r)| {
                    vec![s.n().to_string(), nu_label(s.ell()), count_v(s).to_string(), r.multisets_equal.to_string()]
                }),
            )
        }
    };
    Ok(Rendered::new(body, true))
}
