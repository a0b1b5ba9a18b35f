//! `ghdlab`: batch experiment runner. Each run prints a header line that
//! echoes the experiment, then one JSON record per result (or a CSV table).
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 capacity exceeded,
//! 4 statistically or arithmetically infeasible, 1 anything else.

mod commands;
mod report;
mod values;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{Map, Value};

use ghdlab::bounds::PairDistribution;
use ghdlab::fraction::Fraction;
use ghdlab::gauss::GaussSet;
use ghdlab::Error;

use report::{Format, Header, Report};
use values::Auto;

#[derive(Parser, Debug)]
#[command(name = "ghdlab", version, about = "Gap-Hamming-Distance experiments")]
pub struct Cli {
    /// Seed for all randomness; per-trial seeds are derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Trial count (meaning depends on the command).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Output file (default: standard output).
    #[arg(long, short, global = true)]
    pub output: Option<String>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "GHDLAB_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

const GLOBAL_ARGS: [&str; 5] = ["seed", "trials", "format", "output", "workers"];

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Both sides of the hypercube correlation inequality for set pairs.
    CubeInequality(CubeInequality),
    /// Monte Carlo Gaussian correlation of two sets under ±η correlation.
    GaussCorrelation(GaussCorrelation),
    /// Quadrature check of E[cosh(αx + z)] = cosh(z)·e^{α²/2}.
    CoshCheck(CoshArgs),
    /// Divergence from Gaussianity of projections of a conditioned Gaussian.
    Projection(ProjectionArgs),
    /// Error of a protocol built from a descriptor.
    ProtocolError(ProtocolErrorArgs),
    /// Cost and error of each prefix of a reduction chain.
    ReductionChain(ReductionChainArgs),
    /// Rectangle scan for the joker corruption inequality.
    JokerScan(JokerScanArgs),
    /// Lower bound implied by corruption-with-jokers constants.
    CorruptionBound(CorruptionBoundArgs),
    /// Rectangle discrepancy of a ghd matrix under a pair law.
    Discrepancy(DiscrepancyArgs),
    /// F0 streaming algorithm turned into a ghd protocol.
    StreamReduce(StreamReduceArgs),
    /// Tail of the squared Gaussian norm around n.
    NormConcentration(NormArgs),
}

#[derive(Args, Debug)]
pub struct CubeInequality {
    #[arg(long)]
    pub n: usize,
    /// Correlation, or `auto` for 4b/√n with the tail constant b at ε = 1/8.
    #[arg(long, value_parser = values::auto_real, default_value = "auto")]
    pub rho: Auto,
    #[arg(long, value_parser = values::real, default_value = "0")]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "random")]
    pub sets: SetKind,
    /// Density of A (and of B unless --density-b is given).
    #[arg(long, value_parser = values::real, default_value = "0.5")]
    pub density: f64,
    #[arg(long, value_parser = values::real)]
    pub density_b: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SetKind {
    Random,
    Counterexample,
    Full,
}

#[derive(Args, Debug)]
pub struct GaussCorrelation {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = values::real)]
    pub eta: f64,
    /// First set: `slab:T[:a]`, `halfspace:T[:a]`, `shell:R1:R2`, `coord:T[:i]`, `whole` or JSON.
    #[arg(long = "set-a", value_parser = values::gauss_set, required_unless_present = "opposing")]
    pub set_a: Option<GaussSet>,
    #[arg(long = "set-b", value_parser = values::gauss_set, required_unless_present = "opposing")]
    pub set_b: Option<GaussSet>,
    /// Use A = {x₁ < -T}, B = {x₁ > T}.
    #[arg(long, value_parser = values::real, conflicts_with_all = ["set_a", "set_b"])]
    pub opposing: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CoshArgs {
    /// α values (default: 20 points on [-4, 4]).
    #[arg(long, value_delimiter = ',', value_parser = values::real, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// z values (default: 20 points on [-10, 10]).
    #[arg(long, value_delimiter = ',', value_parser = values::real, allow_negative_numbers = true)]
    pub z: Vec<f64>,
    #[arg(long, default_value_t = ghdlab::gauss::DEFAULT_HERMITE_NODES)]
    pub nodes: usize,
}

#[derive(Args, Debug)]
pub struct ProjectionArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = values::gauss_set, default_value = "slab:1")]
    pub set: GaussSet,
    /// Number of directions.
    #[arg(long, default_value_t = 4)]
    pub directions: usize,
    #[arg(long, value_enum, default_value = "coordinate")]
    pub basis: Basis,
    /// Conditioned samples (default 100000).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Report the fraction of directions with divergence at most this value.
    #[arg(long, value_parser = values::real)]
    pub eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Basis {
    Coordinate,
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct ProtocolSource {
    /// Protocol descriptor JSON (or `@file`).
    #[arg(long, value_parser = values::json_text, conflicts_with_all = ["name", "n", "k"])]
    pub descriptor: Option<String>,
    /// Base protocol when no descriptor is given.
    #[arg(long, value_parser = ["trivial", "sampling"])]
    pub name: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Threshold (default n/2).
    #[arg(long, value_parser = values::real)]
    pub t: Option<f64>,
    /// Gap (default √n).
    #[arg(long, value_parser = values::real)]
    pub g: Option<f64>,
    /// Sample size for the sampling protocol.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ProtocolErrorArgs {
    #[command(flatten)]
    pub source: ProtocolSource,
    #[arg(long, value_enum, default_value = "worst")]
    pub error: ErrorKind,
    /// Correlation of the input law for `--error xi`.
    #[arg(long, value_parser = values::real, default_value = "0")]
    pub p: f64,
    /// Enumerate all inputs and coins instead of sampling.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ErrorKind {
    Worst,
    Xi,
    Profile,
}

#[derive(Args, Debug)]
pub struct ReductionChainArgs {
    /// Descriptor JSON (or `@file`) whose reductions form the chain.
    #[arg(long, value_parser = values::json_text)]
    pub descriptor: String,
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "greedy")]
    pub mode: ScanKind,
    /// Random rectangles for `--mode random`.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    #[arg(long, default_value_t = 8)]
    pub rounds: usize,
    /// Include the witness rectangle's members in the report.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanKind {
    Exhaustive,
    Random,
    Greedy,
}

#[derive(Args, Debug)]
pub struct JokerScanArgs {
    #[arg(long)]
    pub n: usize,
    /// Threshold offset b (correlation 4b/√n).
    #[arg(long, value_parser = values::real, default_value = "0.5")]
    pub b: f64,
    /// Additive term exponent m.
    #[arg(long, value_parser = values::real, conflicts_with = "delta")]
    pub m: Option<f64>,
    /// Sets m = δn.
    #[arg(long, value_parser = values::real)]
    pub delta: Option<f64>,
    /// Minimum ξ₀ mass of scanned rectangles, or `auto` for 2^{-m}.
    #[arg(long, value_parser = values::auto_real)]
    pub floor: Option<Auto>,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Args, Debug)]
pub struct CorruptionBoundArgs {
    #[arg(long, value_parser = values::fraction, default_value = "2/3")]
    pub alpha1: Fraction,
    #[arg(long, value_parser = values::fraction, default_value = "1/2")]
    pub alpha0: Fraction,
    #[arg(long, value_parser = values::fraction, default_value = "1/2")]
    pub alphaplus: Fraction,
    #[arg(long, value_parser = values::fraction, default_value = "1/8")]
    pub eps: Fraction,
    #[arg(long, value_parser = values::real)]
    pub m: f64,
}

#[derive(Args, Debug)]
pub struct DiscrepancyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = values::real)]
    pub t: Option<f64>,
    #[arg(long, value_parser = values::real)]
    pub g: Option<f64>,
    /// Pair law: `xi:P`, `uniform` or JSON.
    #[arg(long, value_parser = values::pair_law, default_value = "uniform")]
    pub mu: PairDistribution,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Args, Debug)]
pub struct StreamReduceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = values::real)]
    pub t: Option<f64>,
    #[arg(long, value_parser = values::real)]
    pub g: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub passes: usize,
    /// Sketch accuracy, or `auto` for g / (2(n + t + g)).
    #[arg(long, value_parser = values::auto_real, default_value = "auto")]
    pub eps: Auto,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_parser = values::real, default_value = "0.1")]
    pub beta: f64,
}

fn echo_parameters(name: &str, sub: &ArgMatches) -> Map<String, Value> {
    let cmd = Cli::command();
    let args: Vec<String> = cmd
        .find_subcommand(name)
        .map(|c| c.get_arguments().map(|a| a.get_id().to_string()).collect())
        .unwrap_or_default();
    let mut out = Map::new();
    for id in sub.ids() {
        let id = id.as_str();
        if GLOBAL_ARGS.contains(&id) || !args.iter().any(|a| a == id) || sub.value_source(id).is_none() {
            continue;
        }
        let Ok(Some(raw)) = sub.try_get_raw(id) else {
            if sub.value_source(id) == Some(ValueSource::CommandLine) {
                out.insert(id.to_string(), Value::Bool(true));
            }
            continue;
        };
        let vals: Vec<Value> = raw.map(|v| Value::from(v.to_string_lossy().into_owned())).collect();
        let v = match vals.len() {
            0 => Value::Bool(true),
            1 => vals.into_iter().next().unwrap(),
            _ => Value::Array(vals),
        };
        out.insert(id.to_string(), v);
    }
    out
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::Capacity(_) => 3,
        Error::Infeasible(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let header = Header {
        command: name.to_string(),
        parameters: echo_parameters(name, sub),
        seed: cli.seed,
        trials: cli.trials,
        format: cli.format,
        output: cli.output.clone(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut report = Report::new(header);
    if let Err(e) = commands::run(&cli, &mut report) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    let written = match &cli.output {
        Some(path) => File::create(path).and_then(|f| report.write(BufWriter::new(f))),
        None => report.write(std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let _ = std::io::stdout().flush();
    ExitCode::SUCCESS
}
