use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use projcalc::coderivative::{coderivative, CoderivResult};
use projcalc::harness::report::{to_json, write_json};
use projcalc::harness::{run_suite, SampleCounts, Suite, SuiteSpec, WeightsMode};
use projcalc::oracle::{test_membership, OracleConfig, OracleVerdict};
use projcalc::projections::{ConvexSet, Mask};
use projcalc::smooth::{nonsmoothness_witness, FdSchedule};
use projcalc::{Dual, Error, LpSpace, Primal};

/// Verification driver for metric projections in weighted ℓ_p spaces.
#[derive(Parser)]
#[command(name = "projcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a JSON report.
    Run(RunArgs),
    /// Sample the coderivative quotient at a point.
    Oracle(OracleArgs),
    /// Search for a direction witnessing nonsmoothness at a boundary point.
    Witness(WitnessArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Unit,
    Random,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 0.5)]
    mask_density: f64,
    #[arg(long, env = "PROJCALC_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    #[arg(long, value_enum, default_value = "unit")]
    weights: Weights,
    /// Sample counts as JSON; omitted fields keep their defaults.
    #[arg(long, value_parser = parse_json::<SampleCounts>)]
    samples: Option<Json<SampleCounts>>,
    /// Report path; `-` writes to stdout.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV flattening of the case metrics.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetName {
    Ball,
    Cylinder,
    Subspace,
    Cone,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Weights as a JSON array; unit weights when omitted.
    #[arg(long, value_parser = parse_json::<Vec<f64>>)]
    weights: Option<Json<Vec<f64>>>,
    #[arg(long, value_enum)]
    set: SetName,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Zero-based mask indices as a JSON array, for cylinders and subspaces.
    #[arg(long, value_parser = parse_json::<Vec<usize>>)]
    mask: Option<Json<Vec<usize>>>,
    /// The point as a JSON array.
    #[arg(long, value_parser = parse_json::<Vec<f64>>)]
    point: Json<Vec<f64>>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, value_parser = parse_json::<Vec<f64>>)]
    xstar: Json<Vec<f64>>,
    #[arg(long, value_parser = parse_json::<Vec<f64>>)]
    ystar: Json<Vec<f64>>,
    /// Strictly decreasing sampling radii as a JSON array.
    #[arg(long, value_parser = parse_json::<Vec<f64>>)]
    radii: Option<Json<Vec<f64>>>,
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long, env = "PROJCALC_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    reject_threshold: Option<f64>,
    #[arg(long)]
    accept_threshold: Option<f64>,
    /// Use random directions only.
    #[arg(long)]
    no_structured_probes: bool,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    space: SpaceArgs,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A flag value given as JSON.
#[derive(Clone)]
struct Json<T>(T);

fn parse_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<Json<T>, String> {
    serde_json::from_str(s).map(Json).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::Witness(args) => witness(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(args: RunArgs) -> Result<bool, Failure> {
    let spec = SuiteSpec {
        suite: args.suite,
        n: args.n,
        p: args.p,
        weights: match args.weights {
            Weights::Unit => WeightsMode::Unit,
            Weights::Random => WeightsMode::Random,
        },
        r: args.r,
        mask_density: args.mask_density,
        seed: args.seed,
        samples: args.samples.map(|j| j.0).unwrap_or_default(),
        tol_scale: args.tol_scale,
    };
    let report = run_suite(&spec)?;
    if args.out.as_os_str() == "-" {
        let mut out = io::stdout().lock();
        write_json(&report, &mut out)?;
        writeln!(out)?;
    } else {
        let mut out = BufWriter::new(File::create(&args.out)?);
        write_json(&report, &mut out)?;
        writeln!(out)?;
        out.flush()?;
    }
    if let Some(path) = args.csv {
        report.write_csv(File::create(path)?)?;
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} cases, {} passed, {} failed, {} undetermined",
        report.suite, s.total, s.passed, s.failed, s.undetermined
    );
    for case in report.failures() {
        eprintln!("FAIL {}", case.id);
        if let Some(cmd) = &case.repro {
            eprintln!("     rerun: {cmd}");
        }
    }
    Ok(report.is_success())
}

fn build(args: &SpaceArgs) -> Result<(LpSpace, ConvexSet, Primal), Failure> {
    let n = args.point.0.len();
    let space = match &args.weights {
        Some(w) => LpSpace::with_weights(args.p, w.0.clone())?,
        None => LpSpace::new(n, args.p)?,
    };
    let point = space.primal(args.point.0.clone())?;
    let mask = || -> Result<Mask, Failure> {
        let idx = args
            .mask
            .as_ref()
            .ok_or_else(|| Failure::Usage("--mask is required for this set".into()))?;
        Ok(Mask::from_indices(n, &idx.0)?)
    };
    let set = match args.set {
        SetName::Ball => ConvexSet::ball(args.r)?,
        SetName::Cylinder => ConvexSet::cylinder(args.r, mask()?)?,
        SetName::Subspace => ConvexSet::subspace(mask()?),
        SetName::Cone => ConvexSet::PositiveCone,
    };
    set.validate(&space)?;
    Ok((space, set, point))
}

#[derive(Serialize)]
struct OracleOutput {
    oracle: OracleVerdict,
    closed_form: Option<CoderivResult>,
    config: OracleConfig,
}

fn oracle(args: OracleArgs) -> Result<bool, Failure> {
    let (space, set, point) = build(&args.space)?;
    let xs: Dual = space.dual(args.xstar.0)?;
    let ys: Dual = space.dual(args.ystar.0)?;
    let mut cfg = OracleConfig::default();
    if let Some(r) = args.radii {
        cfg.radii = r.0;
    }
    if let Some(d) = args.directions {
        cfg.directions_per_radius = d;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.reject_threshold {
        cfg.reject_threshold = t;
    }
    if let Some(t) = args.accept_threshold {
        cfg.accept_threshold = t;
    }
    cfg.structured_probes = !args.no_structured_probes;
    let verdict = test_membership(&space, &set, &point, &xs, &ys, &cfg)?;
    let out = OracleOutput {
        oracle: verdict,
        closed_form: coderivative(&space, &set, &point, &ys).ok(),
        config: cfg,
    };
    println!("{}", to_json(&out));
    Ok(true)
}

fn witness(args: WitnessArgs) -> Result<bool, Failure> {
    let (space, set, point) = build(&args.space)?;
    match nonsmoothness_witness(&space, &set, &point, &FdSchedule::default()) {
        Ok(w) => {
            println!("{}", to_json(&w));
            Ok(true)
        }
        Err(Error::WitnessNotFound(best)) => {
            eprintln!("no witness found; largest defect {best:e}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}
