//! Failure categories and their exit codes.

use std::io;

use thiserror::Error;

/// Everything that can make a command fail.
#[derive(Debug, Error)]
pub enum CliError {
    /// An input could not be read.
    #[error("cannot read {source_name}: {error}")]
    Read {
        /// The path (or `stdin`) that failed.
        source_name: String,
        /// The underlying I/O error.
        error: io::Error,
    },
    /// An input failed to parse.
    #[error("{context}: {error}")]
    Parse {
        /// Which input failed.
        context: String,
        /// The parser's complaint.
        error: treedist::ParseError,
    },
    /// The cost file is unreadable, malformed or not admissible.
    #[error("cost file: {0}")]
    Cost(#[from] treedist::CostError),
    /// A well-formed input violates a contract, e.g. an invalid mapping.
    #[error("{0}")]
    Contract(#[from] treedist::ContractError),
    /// Writing the output failed.
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Write(_) => 1,
            CliError::Cost(_) => 2,
            CliError::Contract(_) => 3,
        }
    }
}

impl From<treedist::Error> for CliError {
    fn from(error: treedist::Error) -> Self {
        match error {
            treedist::Error::Parse(error) => CliError::Parse {
                context: "input".into(),
                error,
            },
            treedist::Error::Cost(error) => CliError::Cost(error),
            treedist::Error::Contract(error) => CliError::Contract(error),
        }
    }
}
