use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid domain: {0}")]
    InvalidDomain(String),

    #[error("non-finite value {value} at flat index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("value count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid domains differ")]
    DomainMismatch,

    #[error("sub-grid is not aligned with the parent grid on axis {axis}")]
    Misaligned { axis: usize },

    #[error("region contains no grid point")]
    EmptyRegion,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} lies outside the truncation window [{low}, {high}]")]
    OutsideWindow { value: f64, low: f64, high: f64 },

    #[error("set is empty")]
    EmptySet,

    #[error("mask has no defined point")]
    EmptyMask,

    #[error("sequence is empty")]
    EmptySequence,

    #[error("tied values in column {column}")]
    Ties { column: usize },

    #[error("non-finite observation in column {column}")]
    NonFiniteObservation { column: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("second-moment matrix of the design is singular")]
    SingularDesign,

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
