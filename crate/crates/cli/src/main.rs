//! `euler-spectra` command-line front end.
//!
//! Subcommands `class`, `ensemble`, `convergence`, `density` and `verify`
//! write JSON or CSV results to `--out` (or stdout) and a run manifest to
//! `<stem>.manifest.json` (or stderr).
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 failed
//! verification, 1 I/O error.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use output::Manifest;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const VERIFICATION: u8 = 4;

    pub fn usage(msg: impl std::fmt::Display) -> Self {
        Self {
            code: Self::USAGE,
            error: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn numerical(e: impl Into<anyhow::Error>) -> Self {
        Self {
            code: Self::NUMERICAL,
            error: e.into(),
        }
    }

    pub fn io(e: impl Into<anyhow::Error>) -> Self {
        Self {
            code: Self::IO,
            error: e.into(),
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(Failure::io)?;
    }
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Class(a) => commands::class(a, cli.format)?,
        Command::Ensemble(a) => commands::ensemble(a, cli.format)?,
        Command::Convergence(a) => commands::convergence(a, cli.format)?,
        Command::Density(a) => commands::density(a, cli.format)?,
        Command::Verify(a) => commands::verify(a)?,
    };
    let manifest = Manifest::new(&cli.command, &outcome, cli.out.as_deref(), start.elapsed().as_secs_f64());
    output::emit(&outcome, &manifest, cli.out.as_deref())?;
    if let Some(e) = outcome.failure {
        return Err(e);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Failure::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
