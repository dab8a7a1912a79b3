//! Command-line front end for [`fracstab`].
//!
//! Exit codes: 0 success, 2 invalid flags, 3 I/O failure, 4 verification
//! discordance.

use std::ffi::OsString;
use std::io;
use std::path::PathBuf;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod output;

use args::{Cli, Command};
use commands::Run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("verdict and orbit fate are discordant")]
    Discordance(String),
    #[error(transparent)]
    Compute(#[from] fracstab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Compute(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Discordance(_) => 4,
        }
    }
}

/// Computes a command inside a pool of `--threads` workers. Nothing is written.
pub fn execute(cli: &Cli) -> Result<Run, CliError> {
    let common = cli.common.clone();
    let command = cli.command.clone();
    fracstab::par::with_threads(common.threads, move || match &command {
        Command::Domain(a) => commands::domain(&common, a),
        Command::Mandelbrot(a) => commands::mandelbrot(&common, a),
        Command::Verify(a) => commands::verify(&common, a),
        Command::Sweep(a) => commands::sweep(&common, a),
        Command::Simulate(a) => commands::simulate(&common, a),
        Command::Area(a) => commands::area(&common, a),
    })
}

/// Parses, runs and writes; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli).and_then(|run| {
        run.outputs.write_all()?;
        Ok(run.report)
    });
    match result {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            if let CliError::Discordance(report) = &e {
                print!("{report}");
            }
            eprintln!("fracstab: {e}");
            e.exit_code()
        }
    }
}
