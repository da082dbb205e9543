//! Command-line front end: derive reduced flows, integrate them, sweep
//! grids of initial states, certify calibration, and export meshes.
//!
//! Exit status contract: 0 on success, 1 when a computation ran but failed
//! its numerical criterion, 2 on invalid input (bad flags, malformed
//! config, constraint violations).

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd_derive;
mod cmd_export;
mod cmd_integrate;
mod cmd_sweep;
mod cmd_verify;
mod config;
mod manifest;

/// A command failure with its exit-status class.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: flags, config files, states, constraints. Exits 2.
    Invalid(String),
    /// The run completed but a numerical criterion failed. Exits 1.
    Numerical(String),
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure::Invalid(message.into())
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure::Numerical(message.into())
    }

    pub fn io(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }

    pub fn io_json(e: serde_json::Error) -> Self {
        Failure::Invalid(e.to_string())
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Numerical(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "calib",
    version,
    about = "Construct and numerically certify calibrated submanifolds of 7- and 8-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive the symmetry-reduced flow of an action and print it
    Derive(cmd_derive::DeriveArgs),
    /// Integrate one initial state and write the dense trajectory
    Integrate(cmd_integrate::IntegrateArgs),
    /// Integrate a grid of initial states into one CSV table
    Sweep(cmd_sweep::SweepArgs),
    /// Sample a family's tangent frames and certify its calibration
    Verify(cmd_verify::VerifyArgs),
    /// Evaluate a family over a grid and write an OBJ mesh
    Export(cmd_export::ExportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Derive(args) => cmd_derive::run(args),
        Command::Integrate(args) => cmd_integrate::run(args),
        Command::Sweep(args) => cmd_sweep::run(args),
        Command::Verify(args) => cmd_verify::run(args),
        Command::Export(args) => cmd_export::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
