use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fas_thz_cli::{apply_overrides, execute, load_config, Command, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    /// Outage probability along the configured sweep.
    OpCurve,
    /// Outage probability against target rate (sweep.axis must be rate).
    RateSweep,
    /// Analytic and Monte Carlo side by side with an agreement flag.
    McValidate,
    /// Port correlation over the corr_grid.
    Corr,
    /// Received power, noise and SNR of the configured link.
    LinkBudget,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::OpCurve => Command::OpCurve,
            Sub::RateSweep => Command::RateSweep,
            Sub::McValidate => Command::McValidate,
            Sub::Corr => Command::Corr,
            Sub::LinkBudget => Command::LinkBudget,
        }
    }
}

/// Outage analysis of fluid-antenna receivers over THz α-μ channels.
#[derive(Debug, Parser)]
#[command(name = "fas-thz", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; stdout when neither this nor output_path is set.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; 0 picks one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match load_config(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    apply_overrides(
        &mut cfg,
        &Overrides {
            out: cli.out,
            seed: cli.seed,
            trials: cli.trials,
        },
    );
    match execute(cli.command.into(), &cfg, cli.workers) {
        Ok(Some(csv)) => {
            print!("{csv}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
