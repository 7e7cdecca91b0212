//! `skinspec`: spectra, eigenmodes and topology diagnostics of perturbed
//! 2-Toeplitz matrices and resonator chains.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Output;
use crate::config::{Overrides, RunConfig};
use crate::error::{CliError, CliResult};
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "skinspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues with their normalised coordinate and classification.
    Spectrum(Common),
    /// Eigenvectors, decay reports and, for chains, mode profiles.
    Modes(Common),
    /// Symbol curves, winding numbers and the pseudospectrum on a grid.
    Topology(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Samples on the unit circle for symbol curves.
    #[arg(long)]
    samples: Option<usize>,
    /// Pseudospectrum region and resolution: re0,re1,im0,im1,nx,ny.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Comma-separated sublevel thresholds.
    #[arg(long)]
    eps: Option<String>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("SKINSPEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("SKINSPEC_THREADS must be a count, got '{value}'")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

type Handler = fn(&RunConfig, &Output) -> CliResult<()>;

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let (common, command): (&Common, Handler) = match &cli.command {
        Command::Spectrum(c) => (c, commands::spectrum),
        Command::Modes(c) => (c, commands::modes),
        Command::Topology(c) => (c, commands::topology),
    };
    let overrides = Overrides {
        samples: common.samples,
        grid: common.grid.clone(),
        eps: common.eps.clone(),
    };
    let cfg = RunConfig::load(&common.config, &overrides)?;
    let out = Output::prepare(&common.out, common.format)?;
    command(&cfg, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("skinspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
