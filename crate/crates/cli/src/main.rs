//! Experiment harness for distributed exact sparse regression.
//!
//! Subcommands: `gen` writes synthetic dataset directories, `run` executes
//! the multi-agent dual-ascent loop and records a trace CSV, `solve-local`
//! solves a single agent's subproblem, `oracle` cross-checks the fast
//! solvers against brute-force enumeration, and `plot` renders trace CSVs
//! as an SVG line chart.
//!
//! Exit codes: 0 on success, 1 on internal or numerical failure, 2 on
//! usage or validation errors.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "sparse-consensus", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic sparse-regression dataset directory.
    Gen(GenArgs),
    /// Run the distributed dual-ascent simulation and write a trace CSV.
    Run(RunArgs),
    /// Solve one agent's sparse subproblem by outer approximation.
    SolveLocal(SolveLocalArgs),
    /// Cross-check the fast solvers against brute-force oracles.
    Oracle(OracleArgs),
    /// Render trace CSVs as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of features.
    #[arg(long)]
    p: usize,
    /// Sparsity of the planted regressor.
    #[arg(long)]
    k: usize,
    /// Number of rows.
    #[arg(long)]
    n: usize,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Feature correlation decay.
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Dataset directory written by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Number of agents.
    #[arg(long)]
    agents: usize,
    /// Topology spec: clique | star | cycle | path | ws:K=<int>,beta=<float>.
    #[arg(long)]
    topology: String,
    /// Centralized ridge weight; the penalty is ||w||^2 / gamma.
    #[arg(long)]
    gamma: f64,
    /// Cardinality bound; defaults to the dataset's planted sparsity.
    #[arg(long)]
    k: Option<usize>,
    /// Maximum number of rounds.
    #[arg(long = "T", default_value_t = 100)]
    rounds: usize,
    /// Early-stop threshold on the consensus error.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Step schedule: harmonic:a0=<f> | adaptive:a0=<f>,kappa=<f>.
    #[arg(long, default_value = "adaptive")]
    schedule: String,
    /// Seed for partitioning and topology construction.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cut budget per local solve.
    #[arg(long, default_value_t = 500)]
    max_cuts: usize,
    /// Trace CSV output path.
    #[arg(long)]
    out_csv: PathBuf,
    /// Optional SVG of the consensus-error curve.
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Args)]
struct SolveLocalArgs {
    /// Dataset directory written by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Local ridge weight; the penalty is ||w||^2 / gamma.
    #[arg(long)]
    gamma: f64,
    /// Cardinality bound; defaults to the dataset's planted sparsity.
    #[arg(long)]
    k: Option<usize>,
    /// Dual vector: `zero` or a path to a file with one float per line.
    #[arg(long, default_value = "zero")]
    d: String,
    /// Cut budget.
    #[arg(long, default_value_t = 500)]
    max_cuts: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of random local instances to check.
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fault-injection knob: scales the simulator's per-agent ridge weight
    /// away from its correct value. Anything but 1.0 must make the duality
    /// checks fail; it exists to validate that this command can detect
    /// mismatches.
    #[arg(long, default_value_t = 1.0)]
    gamma_scale: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// Comma-separated list of trace CSV paths.
    #[arg(long, value_delimiter = ',', required = true)]
    csv: Vec<PathBuf>,
    /// Column to plot against t.
    #[arg(long, default_value = "consensus_error")]
    y: String,
    /// Logarithmic y axis.
    #[arg(long)]
    logy: bool,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
}

/// Command failure with its exit code class.
pub(crate) enum Failure {
    Usage(String),
    Internal(String),
}

impl From<sparse_consensus::Error> for Failure {
    fn from(e: sparse_consensus::Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

pub(crate) type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen(&args),
        Command::Run(args) => commands::run(&args),
        Command::SolveLocal(args) => commands::solve_local(&args),
        Command::Oracle(args) => commands::oracle(&args),
        Command::Plot(args) => commands::plot(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
