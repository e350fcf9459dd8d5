//! The `compton-ledger` command line.

mod args;
mod commands;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command, Format};
pub use commands::{parse_count, parse_time, Outcome, SUITES};

use crate::quantities::{parse_constants, ConstantsTable};

/// Exit status for I/O and configuration problems.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
}

fn load_constants(cli: &Cli) -> Result<ConstantsTable, CliError> {
    match &cli.constants {
        None => Ok(ConstantsTable::builtin()),
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_constants(&bytes)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let table = load_constants(cli)?;
    match &cli.command {
        Command::Check(a) => commands::check(&table, a, cli.format),
        Command::Simulate(a) => commands::simulate(&table, a, cli.format),
        Command::Algebra(a) => commands::algebra(&table, a, cli.format),
        Command::Constants => Ok(commands::constants(&table, cli.format)),
        Command::Report => commands::report(&table, cli.format),
        Command::Particles(a) => commands::particles(&table, a, cli.format),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, &outcome.body)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => match std::io::stdout().write_all(outcome.body.as_bytes()) {
            // A closed reader (e.g. `| head`) is not a failure of the run.
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(CliError::Io(e.to_string()))
            }
            _ => Ok(()),
        },
    }
}

/// Parses `args`, runs the command and returns the exit status: 0 when
/// every check passed, 1 when any failed, 2 on I/O or configuration errors.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        emit(&cli, &outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.diagnostics {
                eprintln!("{line}");
            }
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}
