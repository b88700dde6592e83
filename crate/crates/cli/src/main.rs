//! `skewbaker` command-line tool.
//!
//! Exit codes: 0 success, 2 usage error, 3 verification failure,
//! 4 numeric failure, 1 I/O error.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use skewbaker_core::report::Format;
use thiserror::Error;

use crate::args::{Cli, CommonArgs, ConfigFile, Merge};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<skewbaker_core::Error> for CliError {
    fn from(e: skewbaker_core::Error) -> Self {
        use skewbaker_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::Precondition(_) | E::NotInL => CliError::Usage(e.to_string()),
            E::Overflow(_) | E::Undefined | E::InsufficientSamples { .. } | E::Truncated { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// How a command that produced a report finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    VerificationFailed,
    NumericFailure,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::VerificationFailed => 3,
            Status::NumericFailure => 4,
        }
    }
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let config_path = cli.common.config.clone();
    let file = match &config_path {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let common = cli.common.merge(CommonArgs {
        config: None,
        out: file.out.clone(),
        format: file.format.clone(),
        workers: file.workers,
    });
    let format: Format = common.format.as_deref().unwrap_or("text").parse()?;
    let (mut report, status) = commands::dispatch(cli.command, file, &common)?;
    if let Some(path) = &config_path {
        report.config.push("config_file", path.display().to_string());
    }
    report.config.push("format", if format == Format::Tree { "tree" } else { "text" });
    let text = report.render(format);
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("skewbaker: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
