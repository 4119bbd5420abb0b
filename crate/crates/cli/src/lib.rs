//! Library side of the `cxosc` command line: option handling, the four
//! subcommands and their writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::{Parser, Subcommand};
use std::ffi::OsString;

use config::Options;
use error::{Failure, Outcome, PARAMETER_DOMAIN};

#[derive(Parser)]
#[command(name = "cxosc", version, about = "Complex oscillator figure data and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Tabulate Re V and Im V on the spatial grid
    Potential(Options),
    /// Densities and currents of a packet at each requested time
    Frames(Options),
    /// Wigner maps of oscillator-limit packets, one per configured cell
    Wigner(Options),
    /// Run the verification suites; exit 1 if any check fails
    Verify(Options),
}

pub fn parse<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Runs one command inside a worker pool sized by `--workers`.
pub fn execute(cli: Cli) -> Outcome<()> {
    let (opts, run): (Options, fn(&Options) -> Outcome<()>) = match cli.command {
        Command::Potential(o) => (o, commands::potential::run),
        Command::Frames(o) => (o, commands::frames::run),
        Command::Wigner(o) => (o, commands::wigner::run),
        Command::Verify(o) => (o, commands::verify::run),
    };
    let opts = opts.resolve_file()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = opts.workers {
        if workers == 0 {
            return Err(Failure::new(PARAMETER_DOMAIN, "--workers must be at least 1"));
        }
        pool = pool.num_threads(workers);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::new(PARAMETER_DOMAIN, format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(&opts))
}
