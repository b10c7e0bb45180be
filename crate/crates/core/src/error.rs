use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A CSV row could not be parsed. `line` is 1-based and counts the header.
    Parse { line: usize, message: String },
    /// A row parsed but violates a domain invariant.
    Validation { line: usize, message: String },
    LengthMismatch { expected: usize, found: usize },
    InvalidParameter(String),
    InsufficientData { needed: usize, available: usize },
    /// A criterion or model could not be evaluated on the given data.
    Degenerate(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Validation { line, message } => {
                write!(f, "validation error at line {line}: {message}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InsufficientData { needed, available } => {
                write!(f, "insufficient data: need {needed}, have {available}")
            }
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
