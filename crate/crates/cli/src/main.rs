//! `cmlab`: command-line front end.
//!
//! Exit codes: 0 for a positive result (obeys, found, possible, lemma
//! holds, every criterion passes), 1 for a negative one, 2 for usage or
//! input errors and 3 when a search runs out of budget.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// How a command ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Positive,
    Negative,
    Unfinished,
}

impl Status {
    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Positive
        } else {
            Status::Negative
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Status::Positive) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Ok(Status::Unfinished) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
