//! `treedist`: command-line front end for tree edit distance computations.

mod args;
mod commands;
mod decimal;
mod error;
mod input;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let _ = error.print();
            // Usage mistakes are input errors; help and version are not.
            return if error.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli.command, &cli.options).and_then(emit) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("treedist: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

fn emit(output: String) -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    if output.is_empty() {
        return Ok(());
    }
    writeln!(stdout, "{output}")?;
    Ok(())
}
