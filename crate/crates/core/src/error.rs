use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite matrix or vector entry")]
    NonFinite,

    #[error("vector is not normalized (norm {0})")]
    NotUnit(f64),

    #[error("not a basis: vectors {0} and {1} overlap with |<u|v>| = {2:e}")]
    NotABasis(usize, usize, f64),

    #[error("no eigenbasis labelled '{label}' in dimension {dim}")]
    InvalidLabel { dim: usize, label: char },

    #[error("parameter {name} = {value} out of range: {reason}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("missing parameter {0}")]
    MissingParameter(&'static str),

    #[error("not a mutually unbiased pair (worst deviation {0:e})")]
    NotMutuallyUnbiased(f64),

    #[error("not a complex Hadamard matrix")]
    NotHadamard,

    #[error("invalid move #{index}: {reason}")]
    InvalidMove { index: usize, reason: String },

    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short name used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedDimension(_) => "unsupported-dimension",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotSquare { .. } => "not-square",
            Error::Shape(_) => "shape",
            Error::NonFinite => "non-finite",
            Error::NotUnit(_) => "not-unit",
            Error::NotABasis(..) => "not-a-basis",
            Error::InvalidLabel { .. } => "invalid-label",
            Error::ParameterRange { .. } => "parameter-range",
            Error::MissingParameter(_) => "missing-parameter",
            Error::NotMutuallyUnbiased(_) => "not-mutually-unbiased",
            Error::NotHadamard => "not-hadamard",
            Error::InvalidMove { .. } => "invalid-move",
            Error::Parse { .. } => "parse",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
