use thiserror::Error;

/// Errors raised by the variation engines and verification harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rectangle [{a}, {b}] x [{c}, {d}]")]
    InvalidRect { a: f64, b: f64, c: f64, d: f64 },

    #[error("invalid dissection: {0}")]
    InvalidDissection(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("point ({s}, {t}) is not on the sample grid")]
    OffGrid { s: f64, t: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("{what} = {value} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("invalid exponent: {0}")]
    Exponent(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
