//! Command-line front end: synthesize problem bundles, run the solvers,
//! compare the three algorithms, and run the verification suites.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rankprox::commands::{self, SynthParams};
use rankprox::error::CliError;
use rankprox::verify::{self, RecoveryOptions, Suite};
use rankprox_core::Algorithm;

/// Seed used when --seed is not given; fixed so reruns are byte-identical.
const DEFAULT_SEED: u64 = 20240817;

#[derive(Parser)]
#[command(
    name = "rankprox",
    version,
    about = "Rank-regularized least-squares solvers and verification suites"
)]
struct Cli {
    /// Base seed for every randomized component.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

/// Either the automatic rule or an explicit positive step size.
#[derive(Clone, Copy)]
enum StepArg {
    Auto,
    Value(f64),
}

impl FromStr for StepArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(StepArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(StepArg::Value(v)),
            _ => Err(format!("expected \"auto\" or a positive number, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlgoArg {
    /// Proximal gradient descent.
    Pgd,
    /// Accelerated proximal gradient, non-monotone.
    ApgNm,
    /// Accelerated proximal gradient with the monotone safeguard.
    ApgM,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Pgd => Algorithm::Pgd,
            AlgoArg::ApgNm => Algorithm::ApgNonmonotone,
            AlgoArg::ApgM => Algorithm::ApgMonotone,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic problem bundle (manifest plus CSV matrices).
    Synth {
        /// Observation rows.
        #[arg(long)]
        d: usize,
        /// Dictionary columns (rows of the unknown).
        #[arg(long)]
        n: usize,
        /// Observation columns (columns of the unknown).
        #[arg(long)]
        k: usize,
        /// Rank of the planted ground truth.
        #[arg(long)]
        true_rank: usize,
        /// Standard deviation of the additive Gaussian noise.
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        /// Rank penalty weight.
        #[arg(long)]
        lambda: f64,
        /// Manifest path; matrix CSVs are written next to it.
        #[arg(long)]
        out_path: PathBuf,
    },
    /// Run one solver on a problem bundle.
    Solve {
        /// Manifest path of the bundle to solve.
        #[arg(long)]
        problem_path: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoArg::Pgd)]
        algo: AlgoArg,
        /// "auto" or an explicit positive step size.
        #[arg(long, default_value = "auto")]
        step: StepArg,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Fixed-point residual below which the run stops.
        #[arg(long)]
        tol: Option<f64>,
        /// Where to write the per-iteration trace CSV.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Where to write the final iterate as CSV.
        #[arg(long)]
        x_out: Option<PathBuf>,
    },
    /// Run all three solvers with one shared automatic step size.
    Compare {
        #[arg(long)]
        problem_path: PathBuf,
        /// Directory receiving three traces, a combined CSV, and an SVG chart.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run a verification suite and write its JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Report path; defaults to verify-<suite>.json.
        #[arg(long)]
        report_out: Option<PathBuf>,
        /// Recovery suite: ambient dimension of the observations.
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Recovery suite: tail parameter of the guarantee.
        #[arg(long, default_value_t = 10.0)]
        a: f64,
        /// Recovery suite: squared energy of the observation.
        #[arg(long, default_value_t = 25.0)]
        x0: f64,
        /// Recovery suite: rank penalty weight.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Recovery suite: Monte Carlo trial count.
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Synth { d, n, k, true_rank, noise_sigma, lambda, out_path } => {
            let params =
                SynthParams { d, n, k, true_rank, noise_sigma, lambda, seed: cli.seed };
            commands::cmd_synth(&params, &out_path)?;
            Ok(0)
        }
        Command::Solve { problem_path, algo, step, max_iters, tol, trace_out, x_out } => {
            let step = match step {
                StepArg::Auto => None,
                StepArg::Value(v) => Some(v),
            };
            commands::cmd_solve(
                &problem_path,
                algo.into(),
                step,
                max_iters,
                tol,
                trace_out.as_deref(),
                x_out.as_deref(),
            )?;
            Ok(0)
        }
        Command::Compare { problem_path, out_dir } => {
            commands::cmd_compare(&problem_path, &out_dir)?;
            Ok(0)
        }
        Command::Verify { suite, report_out, d, a, x0, lambda, trials } => {
            let report_out = report_out
                .unwrap_or_else(|| PathBuf::from(format!("verify-{}.json", suite.name())));
            let recovery = RecoveryOptions { d, a, x0_energy: x0, lambda, trials };
            let passed = verify::run_suite(suite, cli.seed, &recovery, &report_out)?;
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    };
    std::process::exit(code);
}
