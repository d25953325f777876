//! `hidden-power`: interpolation, identity testing and experiments over power
//! oracles.
//!
//! Every run writes one JSON document (or a CSV table) to stdout and a short
//! human-readable summary to stderr. Exit codes: 0 success, 1 algorithmic
//! failure, 2 usage error.

mod bench;
mod run;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hidden_power::report::Format;

#[derive(Debug, Parser)]
#[command(name = "hidden-power", version, about = "Recover and compare hidden polynomials from f(x)^e oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether two hidden polynomials are equal.
    Idtest(IdtestArgs),
    /// Recover a hidden polynomial from its power oracle.
    Interpolate(InterpolateArgs),
    /// Serve a power oracle over JSON lines.
    ServeOracle(ServeArgs),
    /// Exhaustive coincidence, distinguishing and product-set measurements.
    Experiment(ExperimentArgs),
    /// Run randomized interpolation over a parameter grid.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Prime modulus.
    #[arg(long)]
    pub p: u64,
    /// Exponent dividing p - 1.
    #[arg(long)]
    pub e: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdtestMode {
    Prefix,
    Random,
    KnownG,
}

#[derive(Debug, Clone, Args)]
pub struct IdtestArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Degree of the hidden polynomials.
    #[arg(long)]
    pub d: u64,
    #[arg(long, value_enum)]
    pub mode: IdtestMode,
    /// Prefix length; defaults to d*e + 1.
    #[arg(long, group = "budget")]
    pub h: Option<u64>,
    /// Derive h from the small-e budget with this delta.
    #[arg(long, group = "budget")]
    pub delta: Option<f64>,
    /// Derive h from the medium-e budget with this epsilon.
    #[arg(long, group = "budget")]
    pub epsilon: Option<f64>,
    /// Constant c(d) for the small-e budget.
    #[arg(long, default_value_t = hidden_power::idtest::DEFAULT_C_D)]
    pub c_d: f64,
    /// Coefficients of the first hidden polynomial (local oracle).
    #[arg(long)]
    pub f: Option<String>,
    /// Coefficients of the second polynomial (hidden, or known in known-g mode).
    #[arg(long)]
    pub g: Option<String>,
    /// Remote oracle addresses: one for f, optionally a second for g.
    #[arg(long, num_args = 1..=2, value_name = "ADDR")]
    pub oracle: Vec<String>,
    /// Number of random points in random mode.
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpMode {
    Naive,
    Randomized,
}

#[derive(Debug, Clone, Args)]
pub struct InterpolateArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplier c_T in |T| = ceil(c_T d log2 p).
    #[arg(long, default_value_t = hidden_power::interp::DEFAULT_T_FACTOR)]
    pub t_factor: f64,
    /// Remote oracle address.
    #[arg(long, conflicts_with = "hidden", required_unless_present = "hidden")]
    pub oracle: Option<String>,
    /// Coefficients of a local hidden polynomial, e.g. "[4,3]".
    #[arg(long)]
    pub hidden: Option<String>,
    #[arg(long, value_enum, default_value = "randomized")]
    pub mode: InterpMode,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Coefficients of the hidden polynomial.
    #[arg(long)]
    pub poly: String,
    /// TCP address to listen on, e.g. 127.0.0.1:0.
    #[arg(long, conflicts_with = "stdio", required_unless_present = "stdio")]
    pub listen: Option<String>,
    /// Serve a single session on stdin/stdout.
    #[arg(long)]
    pub stdio: bool,
    /// Exit after this many TCP connections.
    #[arg(long)]
    pub max_connections: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Coincidence,
    Fraction,
    Equiv,
    ProductSet,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKind,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub d: usize,
    /// Prefix length for product-set.
    #[arg(long)]
    pub h: Option<u64>,
    /// Product order for product-set (1, 2 or 3).
    #[arg(long)]
    pub nu: Option<u32>,
    /// Number of random pairs when --f/--g are not given.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, requires = "g")]
    pub f: Option<String>,
    #[arg(long, requires = "f")]
    pub g: Option<String>,
    #[arg(long, env = "HIDDEN_POWER_FORMAT", default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Primes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<u64>,
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub e: Vec<u64>,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    /// Random hidden polynomials per cell.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Refuse grids with more cells than this.
    #[arg(long, default_value_t = 1000)]
    pub max_cells: usize,
    #[arg(long, env = "HIDDEN_POWER_FORMAT", default_value = "csv")]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Idtest(args) => run::idtest(&args),
        Command::Interpolate(args) => run::interpolate(&args),
        Command::ServeOracle(args) => run::serve(&args),
        Command::Experiment(args) => run::experiment(&args),
        Command::Bench(args) => bench::bench(&args),
    };
    ExitCode::from(outcome)
}
