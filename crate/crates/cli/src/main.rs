//! `mvdyn`: maximum ergodic averages, invariant measures and subactions for
//! finite multi-valued systems, and bounds for expanding maps of the circle.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_NO_CYCLE: u8 = 4;

/// How a command failed.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input.
    Input(anyhow::Error),
    /// The computation ran but a check on its result failed.
    Validation(String),
    /// The system has no cycle, so there is nothing to maximize over.
    NoCycle,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::NoCycle) => {
            eprintln!("error: the system has no cycle, so its orbit space is empty");
            ExitCode::from(EXIT_NO_CYCLE)
        }
    }
}
