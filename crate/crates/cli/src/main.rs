//! `swipt`: solve, check, sweep, compare and cross-verify SWIPT beamforming
//! scenarios.
//!
//! Exit codes: 0 success, 1 usage, parse or I/O error, 2 infeasible
//! scenario, 3 verification failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "swipt",
    version,
    about = "Joint information/energy beamforming for MISO SWIPT downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the joint design for one scenario.
    Solve(SolveArgs),
    /// Report SINR feasibility and the minimum transmit power.
    Check(ScenarioArgs),
    /// Monte-Carlo sweep of the configured designs over the SINR grid.
    Sweep(SweepArgs),
    /// Joint versus separate designs for both receiver types.
    Compare(SweepArgs),
    /// Cross-check the duality solver against the SDR oracle.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Print structured JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: ScenarioArgs,
    /// Receiver type (1 or 2); both when omitted.
    #[arg(long = "type", value_parser = clap::value_parser!(u8).range(1..=2))]
    pub receiver: Option<u8>,
    /// Relative tolerance for the fixed-point and bisection loops.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Experiment TOML file; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative tolerance for the fixed-point and bisection loops.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Print the per-design summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: ScenarioArgs,
    /// Relative value gap allowed between the two solution paths.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Check(a) => commands::check(&a),
        Command::Sweep(a) => commands::sweep(&a, false),
        Command::Compare(a) => commands::sweep(&a, true),
        Command::Verify(a) => commands::verify(&a),
    };
    ExitCode::from(code)
}
