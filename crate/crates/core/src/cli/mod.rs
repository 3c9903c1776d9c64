//! The `heis-overdet` command line.
//!
//! Exit codes: 0 success, 1 a tolerance check failed, 2 usage or input
//! error, 3 internal error. Every emitted file is a pure function of the
//! configuration, with floats printed to 17 significant digits.

pub mod config;
pub mod numlist;
mod commands;

use crate::error::Error;
use clap::{Args, Parser, Subcommand};
use numlist::{number_arg, number_list_arg, NumberList};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Caps the worker threads.
pub const THREADS_ENV: &str = "HEIS_OVERDET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "heis-overdet", version, about = "Heisenberg-group overdetermined problems: identity checks, quadrature and a reduced torsion solver")]
pub struct Cli {
    /// Configuration file: `key = value` lines, `[verify]`, `[check]`,
    /// `[check.<kind>]`, `[solve]`, `[experiment]`, `[experiment.<kind>]`
    /// sections. Flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Seeded pointwise identity suites. Writes a JSON report.
    Verify(VerifyArgs),
    /// Integral identities by quadrature. Writes a JSON record.
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// Solves the reduced problem once. Writes `<prefix>_solution.csv`
    /// (sigma,t,W), `<prefix>_trace.csv` (arc_param,q) and `<prefix>.json`.
    Solve(SolveArgs),
    /// Solver experiments. Write `<prefix>.csv` and `<prefix>.json`.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `default` (every identity) or `master` (sum-of-squares identities only).
    #[arg(long, conflicts_with = "identity")]
    pub suite: Option<String>,
    /// Run one identity, e.g. `magik` or `derfa_all`.
    #[arg(long)]
    pub identity: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = number_arg)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub num_points: Option<usize>,
    /// Overrides every identity's tolerance.
    #[arg(long, value_parser = number_arg)]
    pub tolerance: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CheckKind {
    /// `(Q+2α−2)∫uF_α = −c²∫F_α` and its three constituent identities.
    Pohozaev(CheckArgs),
    /// Solid and surface mean values of a Δ_H-harmonic function against h(0).
    Meanvalue(CheckArgs),
    /// `∫vF_α = c²∫F_α` for the P-function `v`.
    Average(CheckArgs),
    /// Calibrates β and checks the surface formula for `h ≡ 1`.
    Beta(CheckArgs),
}

#[derive(Debug, Args, Default)]
pub struct CheckArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = number_arg, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = number_arg)]
    pub radius: Option<f64>,
    /// `analytic` (u_α on the ball) or `grid` (a solve at `--h`, compared
    /// against the grid-error estimate from a second solve at `2h`).
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long, value_parser = number_arg)]
    pub h: Option<f64>,
    /// Mean-value test function: `one`, `t` or `pole` (needs `--pole-t`).
    #[arg(long)]
    pub field: Option<String>,
    /// Height of the pole of the translated fundamental solution; `|t₀| > R²`.
    #[arg(long, value_parser = number_arg, allow_hyphen_values = true)]
    pub pole_t: Option<f64>,
    /// `tensor` or `adaptive`.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_parser = number_arg)]
    pub quad_tol: Option<f64>,
    /// Pass threshold for the reported residual.
    #[arg(long, value_parser = number_arg)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = number_arg)]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = number_arg)]
    pub radius: Option<f64>,
    /// Domain `σ² + (1+ε)t² < R⁴`; 0 is the gauge ball.
    #[arg(long, value_parser = number_arg, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = number_arg)]
    pub h: Option<f64>,
    /// Boundary samples of the Neumann ratio.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub prefix: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentKind {
    /// Errors against the exact (ball) or finest-grid solution; CSV columns
    /// alpha,h,nodes,max_err,l2_err,order_max,order_l2.
    Convergence(ExperimentArgs),
    /// Neumann-ratio spread on perturbed domains; CSV columns
    /// epsilon,mean_q,cv,pfunction_max_deviation.
    Perturbation(ExperimentArgs),
}

#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = number_arg)]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = number_list_arg)]
    pub alphas: Option<NumberList>,
    #[arg(long, value_parser = number_arg)]
    pub radius: Option<f64>,
    #[arg(long, value_parser = number_arg, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = number_list_arg, allow_hyphen_values = true)]
    pub epsilons: Option<NumberList>,
    #[arg(long, value_parser = number_arg)]
    pub h: Option<f64>,
    /// Comma-separated, fractions allowed: `1/32,1/64,1/128`.
    #[arg(long, value_parser = number_list_arg)]
    pub hs: Option<NumberList>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub prefix: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match commands::dispatch(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::AxisSingularity | Error::SingularPoint(_) => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

fn configure_threads() -> crate::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool may already exist when running inside a test harness.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
