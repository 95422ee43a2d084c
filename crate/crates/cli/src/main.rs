use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tvs_cli::config::SimConfig;
use tvs_cli::runner::{self, Verdict};
use tvs_cli::{CliError, EXIT_THRESHOLD};

#[derive(Parser)]
#[command(
    name = "tvs",
    version,
    about = "Thermoviscoelastic flow simulator with thermodynamic audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-step a scenario and write budget.csv, snapshots and summary.txt
    Run { config: PathBuf },
    /// Manufactured-solution convergence study
    Mms { config: PathBuf },
    /// Compare the finite-difference solver against the spectral Galerkin reference
    GalerkinCompare { config: PathBuf },
    /// Check the material laws against the regime's structural bounds
    ValidateMaterial { config: PathBuf },
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::ThresholdMissed => EXIT_THRESHOLD,
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run { config } => {
            let cfg = SimConfig::load(&config)?;
            let summary = runner::run_scenario(&cfg, &cfg.out_dir())?;
            print!("{}", summary.render());
            Ok(0)
        }
        Command::Mms { config } => {
            let cfg = SimConfig::load(&config)?;
            runner::run_mms(&cfg, &cfg.out_dir()).map(verdict_code)
        }
        Command::GalerkinCompare { config } => {
            let cfg = SimConfig::load(&config)?;
            runner::run_galerkin_compare(&cfg, &cfg.out_dir()).map(verdict_code)
        }
        Command::ValidateMaterial { config } => {
            let cfg = SimConfig::load(&config)?;
            Ok(verdict_code(runner::validate_material(&cfg)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
