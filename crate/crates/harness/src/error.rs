use std::fmt;

use crate::config::ConfigError;

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(String),
    /// A run produced non-finite values; the message names the step.
    Numeric(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Numeric(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(s) => write!(f, "configuration error: {s}"),
            RunError::Numeric(s) => write!(f, "numeric abort: {s}"),
            RunError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<liouville_core::Error> for RunError {
    fn from(e: liouville_core::Error) -> Self {
        match e {
            liouville_core::Error::NumericAbort { .. } => RunError::Numeric(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}
