//! `trackscore` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Ctx};
use trackscore::experiments::MiModel;
use trackscore::Exec;

#[derive(Debug, Parser)]
#[command(name = "trackscore", version, about = "Signature-based scoring of time series")]
struct Cli {
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Truncated signature of every series in a CSV file.
    Sig(commands::SigArgs),
    /// Divergence d(a, b) between the empirical measures of two CSV files.
    Divergence(commands::DivergenceArgs),
    /// Entropy of the empirical measure of a CSV file.
    Entropy(commands::EntropyArgs),
    /// Mean score of observed series against a forecast measure.
    Score(commands::ScoreArgs),
    /// Mutual information for one mixing weight of a simulated model.
    Mi(commands::MiArgs),
    /// Geometric divergence against soft-DTW and DTW under power time warps.
    ExperimentWarp(commands::WarpArgs),
    /// Mutual information of the spiral process and its rotational speed.
    ExperimentMiScalar(commands::MiExperimentArgs),
    /// Mutual information of the warped mixture and its driving path.
    ExperimentMiWarp(commands::MiExperimentArgs),
    /// Simulated series in the ingestion CSV format.
    Simulate(commands::SimulateArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx {
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
    };
    match &cli.command {
        Command::Sig(a) => commands::sig(a, ctx),
        Command::Divergence(a) => commands::divergence(a, ctx),
        Command::Entropy(a) => commands::entropy(a, ctx),
        Command::Score(a) => commands::score(a, ctx),
        Command::Mi(a) => commands::mi(a, ctx),
        Command::ExperimentWarp(a) => commands::experiment_warp(a, ctx),
        Command::ExperimentMiScalar(a) => commands::experiment_mi(a, MiModel::Spiral, ctx),
        Command::ExperimentMiWarp(a) => commands::experiment_mi(a, MiModel::WarpedMix, ctx),
        Command::Simulate(a) => commands::simulate(a, ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
