//! Batch front end for the inclined-cylinder Casimir library: single-point
//! evaluations, sweeps and figure data, written as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use clap::{Parser, Subcommand};

pub use commands::{emit, execute, Output};
pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "inclined-casimir",
    version,
    about = "Casimir interaction between inclined cylinders"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Interaction energy at one configuration (needs --d).
    Energy,
    /// Classical force -dE/dd at one configuration (needs --d).
    Force,
    /// Torque -dE/dtheta at one configuration (needs --d).
    Torque,
    /// Energy against r = R/d at fixed --theta, with proximity-force and
    /// large-distance references.
    Sweep,
    /// Angular amplitude Omega(theta) of the large-distance energy.
    Omega {
        /// Print the cosine coefficients Omega_0, Omega_2, ..., Omega_2N instead.
        #[arg(long)]
        fourier: Option<usize>,
    },
    /// Proximity-force estimates at one configuration (needs --d).
    Pfa,
    /// Figure data. 2 and 3: energy over PFA against r at theta = pi/2 and
    /// pi/4. 4: omega(theta)/omega(pi/2) with omega = E sin(theta), per r.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(2..=4))]
        which: u8,
    },
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Energy => "energy".into(),
            Command::Force => "force".into(),
            Command::Torque => "torque".into(),
            Command::Sweep => "sweep".into(),
            Command::Omega { .. } => "omega".into(),
            Command::Pfa => "pfa".into(),
            Command::Figure { which } => format!("figure {which}"),
        }
    }
}

/// Resolves the configuration, computes and writes the output.
pub fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::resolve(cli.overrides)?;
    let out = execute(&cli.command, &cfg)?;
    emit(&out, &cfg)
}
