//! Failure classes and their process exit codes.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Config,
    Io,
    Network,
    Validation,
}

impl Failure {
    pub fn exit_code(self) -> i32 {
        match self {
            Failure::Config => 10,
            Failure::Io => 11,
            Failure::Network => 12,
            Failure::Validation => 13,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::Config => "configuration error",
            Failure::Io => "I/O error",
            Failure::Network => "network error",
            Failure::Validation => "validation error",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{kind}: {source:#}")]
pub struct CliError {
    pub kind: Failure,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn new(kind: Failure, source: impl Into<anyhow::Error>) -> Self {
        CliError { kind, source: source.into() }
    }

    pub fn msg(kind: Failure, message: impl fmt::Display) -> Self {
        CliError { kind, source: anyhow::anyhow!("{message}") }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a failure class and a context message to any error.
pub trait Classify<T> {
    fn classify<C: fmt::Display + Send + Sync + 'static>(self, kind: Failure, context: C) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn classify<C: fmt::Display + Send + Sync + 'static>(self, kind: Failure, context: C) -> CliResult<T> {
        self.map_err(|e| CliError { kind, source: e.into().context(context) })
    }
}
