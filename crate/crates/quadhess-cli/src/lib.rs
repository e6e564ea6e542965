//! Command-line surface for the quadric Hessian-determinant toolkit.
//!
//! Subcommands: `verify` (one instance, one point), `sample` (randomized
//! sweeps), `bench` (closed form vs finite differences), `checkpoints`
//! (exact intermediate values). Exit codes: 0 success, 1 identity failure,
//! 2 skipped preconditions, 64 usage or parse error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod io;
pub mod report;

use io::Mode;
use quadhess::quadric::BranchSign;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for BranchSign {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => BranchSign::Plus,
            BranchArg::Minus => BranchSign::Minus,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "quadhess",
    about = "Verify the Hessian-determinant identity of quadric graph functions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Verify the identity at one point of a quadric instance
    Verify(VerifyArgs),
    /// Randomized verification sweep over generated instances
    Sample(SampleArgs),
    /// Time the closed-form Hessian determinant against finite differences
    Bench(BenchArgs),
    /// Evaluate the exact intermediate checkpoints at one point
    Checkpoints(CheckpointsArgs),
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Path to the quadric JSON file
    #[arg(long = "q")]
    pub q: PathBuf,
    /// Comma-separated coordinates ("3/5" in exact mode, "0.6" in float,
    /// "[re,im]" in complex)
    #[arg(long)]
    pub point: String,
    /// Root branch of the graph function
    #[arg(long, value_enum, default_value = "plus")]
    pub branch: BranchArg,
    /// Computation mode
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Relative tolerance for the floating kinds
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write a JSON report here
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Graph dimension of the generated instances
    #[arg(long)]
    pub n: usize,
    /// Number of instances
    #[arg(long)]
    pub trials: usize,
    /// Base seed; instance i derives its own stream from it
    #[arg(long)]
    pub seed: u64,
    /// Computation mode
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Relative tolerance for the floating kinds
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write a JSON report here
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated list of graph dimensions
    #[arg(long = "n-list")]
    pub n_list: String,
    /// Repetitions per dimension
    #[arg(long)]
    pub reps: usize,
    /// Base seed
    #[arg(long)]
    pub seed: u64,
    /// Write CSV (n,method,mean_ns,max_abs_discrepancy) here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct CheckpointsArgs {
    /// Path to the quadric JSON file
    #[arg(long = "q")]
    pub q: PathBuf,
    /// Comma-separated rational coordinates
    #[arg(long)]
    pub point: String,
    /// Must be `exact`
    #[arg(long, value_enum)]
    pub mode: Mode,
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                64
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verify(args) => commands::cmd_verify(args),
        Command::Sample(args) => commands::cmd_sample(args),
        Command::Bench(args) => commands::cmd_bench(args),
        Command::Checkpoints(args) => commands::cmd_checkpoints(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            64
        }
    }
}
