//! Library side of the `kusuoka` CLI: model-file schema, loading and
//! emission, report envelopes, and the command implementations.

pub mod commands;
pub mod model;
pub mod report;

use thiserror::Error;

/// CLI-level failure, carrying the process exit code: validation problems
/// (bad files, bad parameters, failed numeric contracts) exit with 2, guard
/// violations (refused enumerations) with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Guard(_) => 3,
        }
    }
}

impl From<kusuoka_core::Error> for CliError {
    fn from(e: kusuoka_core::Error) -> Self {
        match e {
            kusuoka_core::Error::TooManyOutcomes { .. }
            | kusuoka_core::Error::EnumerationTooLarge { .. } => CliError::Guard(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
