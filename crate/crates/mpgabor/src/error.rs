use std::fmt;

use mpgabor_core::Error;

/// A failed run and the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub const VALIDATION: i32 = 2;
    pub const COMPUTATION: i32 = 3;
    pub const ASSERTION: i32 = 4;

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { code: Self::VALIDATION, kind: "validation", message: msg.into() }
    }

    pub fn computation(msg: impl Into<String>) -> Self {
        CliError { code: Self::COMPUTATION, kind: "computation", message: msg.into() }
    }

    pub fn assertion(msg: impl Into<String>) -> Self {
        CliError { code: Self::ASSERTION, kind: "assertion", message: msg.into() }
    }

    pub fn io(e: std::io::Error) -> Self {
        Self::computation(format!("io: {e}"))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Dimension(_) | Error::Validation(_) | Error::Precondition(_) | Error::GridMismatch(_) => {
                CliError::validation(e.to_string())
            }
            _ => CliError::computation(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}
