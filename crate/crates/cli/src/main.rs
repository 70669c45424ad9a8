//! `polyhahn`: enumeration, evaluation, exact verification suites and limit
//! scans with JSON/CSV output.
//!
//! Exit codes: 0 when every checked identity holds, 1 when one is falsified,
//! 2 on invalid configuration.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyhahn::error::Error;
use polyhahn::exact::{parse_rational, Rational};
use polyhahn::spectra::Basis;
use polyhahn::verify::{Suite, Sweep};

use commands::{FamilyInput, OperatorChoice, SpecInput, VerifyInput};
use output::{emit, Format, Rendered};

#[derive(Parser)]
#[command(name = "polyhahn", version, about = "Exact multivariate Hahn polynomials on polyhedral lattice domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Dimension d (read off --ell when omitted).
    #[arg(short = 'd')]
    d: Option<usize>,
    /// Total degree bound N.
    #[arg(short = 'N')]
    n: Option<u32>,
    /// Comma-separated l_1,...,l_{d+1}; omitted means every l_i = N.
    #[arg(long, value_delimiter = ',')]
    ell: Option<Vec<u32>>,
}

impl From<&SpecArgs> for SpecInput {
    fn from(a: &SpecArgs) -> Self {
        SpecInput { d: a.d, n: a.n, ell: a.ell.clone() }
    }
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// hahn, krawtchouk, meixner, charlier, oscillator or gauged-oscillator.
    #[arg(long)]
    family: Option<String>,
    /// Krawtchouk probabilities p_1,...,p_d.
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    p: Option<Vec<Rational>>,
    /// Meixner shape s.
    #[arg(long, value_parser = rational)]
    s: Option<Rational>,
    /// Meixner parameters c_1,...,c_d.
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    c: Option<Vec<Rational>>,
    /// Charlier parameters a_1,...,a_d.
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    a: Option<Vec<Rational>>,
}

impl From<&FamilyArgs> for FamilyInput {
    fn from(f: &FamilyArgs) -> Self {
        FamilyInput { family: f.family.clone(), p: f.p.clone(), s: f.s.clone(), c: f.c.clone(), a: f.a.clone() }
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write atomically to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Standard,
    Forward,
    Backward,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::Standard => Basis::Standard,
            BasisArg::Forward => Basis::Forward,
            BasisArg::Backward => Basis::Backward,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the lattice domain V.
    Domain {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Enumerate the index set H.
    Index {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite on a spec, a family or a sweep.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Monomial degree bound for polynomial representations.
        #[arg(long, default_value_t = polyhahn::operators::DEFAULT_DEGREE)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// e.g. `d=2..4,N<=8` or `d=4..5,N<=9,samples=200`.
        #[arg(long)]
        sweep: Option<Sweep>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Convergence scan toward a limiting family.
    Limits {
        /// hahn-krawtchouk, krawtchouk-charlier, charlier-hermite or operator-jacobi.
        name: String,
        #[arg(long, value_delimiter = ',', value_parser = rational)]
        a: Option<Vec<Rational>>,
        /// Single polynomial degree (charlier-hermite).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_delimiter = ',', value_parser = rational)]
        ladder: Option<Vec<Rational>>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluation table of the basis polynomials on V.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "standard")]
        basis: BasisArg,
        /// Only this index (comma separated).
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<u32>>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact Gram matrix of a basis.
    Gram {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "standard")]
        basis: BasisArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Export a lattice operator as sparse triplets.
    Operator {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Pair operator L_{i,j}, as `i,j`.
        #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with_all = ["partial", "full"])]
        pair: Option<Vec<usize>>,
        /// Partial sum M_k.
        #[arg(long, conflicts_with = "full")]
        partial: Option<usize>,
        /// Sum of all pair operators.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Column heights of V and H for d = 2 and their shuffle.
    Heights {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Report-only projection heights for d = 3.
    #[command(name = "experiment-d3")]
    ExperimentD3 {
        #[command(flatten)]
        spec: SpecArgs,
        /// Run over a d = 3 sweep instead of one spec.
        #[arg(long)]
        sweep: Option<Sweep>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

impl Command {
    fn out(&self) -> &OutArgs {
        match self {
            Command::Domain { out, .. }
            | Command::Index { out, .. }
            | Command::Verify { out, .. }
            | Command::Limits { out, .. }
            | Command::Eval { out, .. }
            | Command::Gram { out, .. }
            | Command::Operator { out, .. }
            | Command::Heights { out, .. }
            | Command::ExperimentD3 { out, .. } => out,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Eval { .. } | Command::Operator { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("POLYHAHN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("POLYHAHN_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run(command: &Command) -> Result<Rendered, Error> {
    let format = command.out().format.unwrap_or(command.default_format());
    match command {
        Command::Domain { spec, .. } => Ok(commands::domain(&SpecInput::from(spec).resolve()?, format)),
        Command::Index { spec, .. } => Ok(commands::index(&SpecInput::from(spec).resolve()?, format)),
        Command::Verify { suite, spec, family, degree, seed, sweep, .. } => {
            let input = VerifyInput { suite: *suite, degree: *degree, seed: *seed, sweep: sweep.clone() };
            commands::verify(&input, &spec.into(), &family.into(), format)
        }
        Command::Limits { name, a, n, ladder, .. } => commands::limits(name, a.as_deref(), *n, ladder.as_deref(), format),
        Command::Eval { spec, basis, nu, .. } => {
            commands::eval(&SpecInput::from(spec).resolve()?, (*basis).into(), nu.as_deref(), format)
        }
        Command::Gram { spec, basis, .. } => commands::gram(&SpecInput::from(spec).resolve()?, (*basis).into(), format),
        Command::Operator { spec, family, pair, partial, full, .. } => {
            let choice = match (pair.as_deref(), partial, full) {
                (Some(&[i, j]), _, _) => OperatorChoice::Pair(i, j),
                (Some(_), _, _) => return Err(Error::Config("--pair takes exactly two indices i,j".into())),
                (None, Some(k), _) => OperatorChoice::Partial(*k),
                (None, None, true) => OperatorChoice::Full,
                (None, None, false) => return Err(Error::Config("choose one of --pair, --partial, --full".into())),
            };
            commands::operator(&spec.into(), &family.into(), choice, format)
        }
        Command::Heights { spec, .. } => commands::heights(&SpecInput::from(spec).resolve()?, format),
        Command::ExperimentD3 { spec, sweep, seed, .. } => {
            let specs = match sweep {
                Some(sw) if sw.d_min == 3 && sw.d_max == 3 => sw.specs(*seed),
                Some(_) => return Err(Error::Config("experiment-d3 sweeps need d=3".into())),
                None => vec![SpecInput::from(spec).resolve()?],
            };
            commands::experiment_d3(&specs, format)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InternalConsistency(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| {
        let rendered = run(&cli.command)?;
        emit(&rendered.body, cli.command.out().out.as_deref())?;
        Ok(rendered.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
