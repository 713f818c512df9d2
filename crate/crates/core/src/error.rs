use thiserror::Error;

/// Errors produced while configuring, assembling or solving a composite-grid problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid or run configuration. The message names the violated precondition.
    #[error("configuration error: {0}")]
    Config(String),

    /// Shape mismatch between traces, fields or closures.
    #[error("dimension error: expected {expected}, got {actual} ({context})")]
    Dimension {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    /// A direct solve failed (numerically singular matrix or residual check failed).
    #[error("solver error: {0}")]
    Solver(String),

    /// An operation was requested that the inputs do not support.
    #[error("usage error: {0}")]
    Usage(String),

    /// Reading a configuration or writing an output file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize, context: &'static str) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected,
            actual,
            context,
        })
    }
}
