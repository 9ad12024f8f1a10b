//! `mginf` — batch analytics for the M|G|infinity service-time family.
//!
//! Subcommands: `validate | eval | moments | busy | simulate | sweep`.
//! Reports go to stdout as JSON, curves and tables as CSV; human-readable
//! messages go to stderr. Exit codes: 0 success, 1 a check or verdict
//! failed, 2 usage or parameter error.

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

mod args;
mod battery;
mod commands;
mod config;
mod output;
mod report;

use args::{Cli, Cmd};

/// A usage or parameter problem; maps to exit code 2.
pub struct UsageError(pub String);

impl UsageError {
    pub fn new(msg: impl std::fmt::Display) -> Self {
        UsageError(msg.to_string())
    }
}

/// Commands return the exit code on success (0 = all green, 1 = some check
/// or verdict failed) or a usage error (exit 2).
type CmdResult = Result<u8, UsageError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Validate(a) => commands::validate::run(a),
        Cmd::Eval(a) => commands::eval::run(a),
        Cmd::Moments(a) => commands::moments::run(a),
        Cmd::Busy(a) => commands::busy::run(a),
        Cmd::Simulate(a) => commands::simulate::run(a),
        Cmd::Sweep(a) => commands::sweep::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
