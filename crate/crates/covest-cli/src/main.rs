use clap::{Parser, Subcommand};

use covest_cli::commands::{
    cmd_calibrate, cmd_estimate, cmd_simulate, CalibrateArgs, EstimateArgs, SimulateArgs,
};

/// Low-rank covariance estimation from data with missing observations.
///
/// Exit codes: 0 success, 2 parse/schema errors, 3 domain errors,
/// 4 verdict failure, 5 calibration failure, 1 internal errors.
#[derive(Parser)]
#[command(name = "covest", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a covariance matrix from a data file with missing entries.
    Estimate(EstimateArgs),
    /// Run a seeded Monte Carlo sweep from a JSON config.
    Simulate(SimulateArgs),
    /// Calibrate the data-driven lambda constant for a target coverage.
    Calibrate(CalibrateArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Calibrate(args) => cmd_calibrate(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
