//! Command-line front end: band tables, regime classification, wave-packet
//! propagation, Floquet bands, finite-lattice spectra and figure recipes.

mod commands;
mod config;
mod error;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{BandsArgs, ClassifyArgs, FloquetArgs, PropagateArgs, SpectrumArgs};
use config::resolve;
use error::{CliError, CliResult};
use reproduce::ReproduceArgs;

#[derive(Parser, Debug)]
#[command(name = "ptlattice", version, about = "Non-Hermitian Rice-Mele lattice toolkit")]
struct Cli {
    /// Flat JSON object of parameters; flags given on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the two complex bands on a quasi-momentum grid
    Bands(BandsArgs),
    /// Print the convective/absolute verdict as JSON
    Classify(ClassifyArgs),
    /// Evolve a Gaussian packet and trace rays through it
    Propagate(PropagateArgs),
    /// Quasi-energy bands of the driven lattice and its averaged parameters
    Floquet(FloquetArgs),
    /// Eigenvalues of the truncated lattice with confined gain/loss
    Spectrum(SpectrumArgs),
    /// Run the pinned parameter set of a reference figure
    Reproduce(ReproduceArgs),
}

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("PTLATTICE_THREADS") else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("PTLATTICE_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}

fn print(value: &Value) -> CliResult<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let config = cli.config.as_deref();
    let report = match cli.command {
        Command::Bands(a) => commands::bands(resolve(a, config)?)?,
        Command::Classify(a) => commands::classify_cmd(resolve(a, config)?)?,
        Command::Propagate(a) => commands::propagate(resolve(a, config)?)?,
        Command::Floquet(a) => commands::floquet(resolve(a, config)?)?,
        Command::Spectrum(a) => commands::spectrum_cmd(resolve(a, config)?)?,
        Command::Reproduce(a) => {
            for panel in reproduce::reproduce(resolve(a, config)?)? {
                print(&panel)?;
            }
            return Ok(());
        }
    };
    print(&report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
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
