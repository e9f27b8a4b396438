//! `oa-replicator`: command-line front end for the open-access game.
//!
//! Exit codes: 0 success, 1 domain violation, 2 malformed input,
//! 3 numerical failure.
//!
//! `OA_REPLICATOR_SEED` is reserved for future sampling commands; every
//! current subcommand is deterministic and ignores it.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oa_replicator::{Convention, Method};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Malformed(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "oa-replicator", version, about = "Replicator dynamics of the scientists-vs-publishers open-access game")]
pub struct Cli {
    /// Flat `key = value` input file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override or add a config entry, e.g. `--set P=8` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Publisher payoff convention used to reduce a game to (a, b, c, d).
    #[arg(long, global = true, value_parser = parse_convention)]
    pub convention: Option<Convention>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `portrait --format csv`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the economic parameters against every model constraint.
    Validate {
        /// Also require G + I > L/2, which rules out pure equilibria.
        #[arg(long)]
        strict: bool,
    },
    /// Print the payoff matrices built from the parameters.
    Payoffs,
    /// Print the interior mixed equilibrium.
    Equilibrium,
    /// Integrate an orbit and write `t,x,y,H` rows.
    Simulate(SimulateArgs),
    /// Draw nested level curves of H around the equilibrium.
    Portrait(PortraitArgs),
    /// Follow strict best replies from (s1,p1).
    Cycle,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<String>,
    /// Step size [default: 1e-3].
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    /// Final time [default: ten linearized periods].
    #[arg(long = "t-end", allow_hyphen_values = true)]
    pub t_end: Option<String>,
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    /// Also estimate the orbit period.
    #[arg(long)]
    pub period: bool,
}

#[derive(Debug, clap::Args)]
pub struct PortraitArgs {
    /// Number of level curves.
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Vertices per curve.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
