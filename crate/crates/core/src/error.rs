//! Crate-wide error type.

use std::fmt;

/// Errors surfaced by scenario construction, quadrature and the solvers.
#[derive(Debug)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// A numerical routine failed (non-convergent quadrature, non-finite
    /// objective). Carries a human-readable description of where.
    Numerical(String),
    /// A configuration file could not be parsed or failed validation.
    /// `key` is the dotted path of the offending entry when known.
    Config { key: String, message: String },
    /// Filesystem failure while reading configs or writing outputs.
    Io(std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::Config { key, message } => {
                if key.is_empty() {
                    write!(f, "config error: {message}")
                } else {
                    write!(f, "config error at `{key}`: {message}")
                }
            }
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
