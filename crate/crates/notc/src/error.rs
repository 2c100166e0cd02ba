//! Error type shared by the library and the experiment harness.

use std::fmt;
use std::io;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the library or the harness.
#[derive(Debug)]
pub enum Error {
    /// A vector had a different length than the receiver expected.
    DimensionMismatch { expected: usize, actual: usize },
    /// An operation needed more elements than the caller supplied.
    TooFewElements { needed: usize, actual: usize },
    /// An index referred outside its collection.
    IndexOutOfRange { index: usize, len: usize },
    /// A configuration value failed validation; the message names the key.
    InvalidConfig(String),
    /// `step` was called on an environment whose trial already ended.
    TrialOver,
    /// An input file (records CSV) could not be parsed.
    Malformed(String),
    /// Underlying I/O failure.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::TooFewElements { needed, actual } => {
                write!(f, "too few elements: needed {needed}, got {actual}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Error::TrialOver => write!(f, "trial already ended; call reset before stepping"),
            Error::Malformed(msg) => write!(f, "malformed input: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}
