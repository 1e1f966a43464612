//! `satqkd`: link budgets, capacity bounds, key rates and pass planning
//! from a single key-value configuration.

mod commands;
mod config;
mod error;
mod settings;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "satqkd", version, about = "Satellite CV-QKD link budgets and key rates")]
struct Cli {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set orbit.altitude=155km`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Bounds U, V, B and thermal bounds over `sweep.altitudes` x `sweep.angles` (CSV).
    Bounds,
    /// Post-selected key rate versus zenith angle at `orbit.altitude` (CSV).
    Rate,
    /// Sliced zenith-crossing pass and key yield (JSON).
    Pass,
    /// Satellite bits per day against fiber with ideal repeaters (CSV).
    CompareFiber,
    /// Monte Carlo check of the fading law (CSV).
    ValidateMc,
    /// Maximum secure range per environment (CSV).
    MaxRange,
    /// Print every key with its resolved value.
    ShowConfig,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for pair in &cli.set {
        cfg.set_pair(pair)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cli.jobs)))?;
    let mut buf = Vec::new();
    pool.install(|| match cli.command {
        Command::Bounds => commands::bounds(&cfg, &mut buf),
        Command::Rate => commands::rate(&cfg, &mut buf),
        Command::Pass => commands::pass(&cfg, &mut buf),
        Command::CompareFiber => commands::compare_fiber(&cfg, &mut buf),
        Command::ValidateMc => commands::validate_mc(&cfg, &mut buf),
        Command::MaxRange => commands::max_range(&cfg, &mut buf),
        Command::ShowConfig => commands::show_config(&cfg, &mut buf),
    })?;
    // nothing is printed unless the whole command succeeded
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(&buf)?;
    stdout.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("satqkd: {e}");
            e.exit_code()
        }
    }
}
