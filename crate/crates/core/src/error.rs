use thiserror::Error;

/// Errors shared by dataset construction, the linear-algebra kernels, the
/// solvers, and the evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty matrix: need at least one row and one column")]
    EmptyMatrix,

    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("requested rank {k} outside the valid range 1..={max}")]
    RankRequestTooLarge { k: usize, max: usize },

    #[error("failed to converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("degenerate data: scatter matrix is numerically zero")]
    DegenerateData,

    #[error("tau must be strictly positive, got {value}")]
    NonPositiveTau { value: f64 },

    #[error("correlation must lie strictly inside (-1, 1), got {value}")]
    InvalidCorrelation { value: f64 },

    #[error("fraction must lie strictly inside (0, 1), got {value}")]
    FractionOutOfRange { value: f64 },

    #[error("image shape {height}x{width} does not match feature dimension {d}")]
    ShapeMismatch { height: usize, width: usize, d: usize },

    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },

    #[error("inconsistent dimensions: {context}")]
    InconsistentDimensions { context: String },

    #[error("p must lie in (0, 2], got {value}")]
    InvalidP { value: f64 },

    #[error("too few samples: have {n}, need at least {required}")]
    TooFewSamples { n: usize, required: usize },

    #[error("mask must flag at least one normal sample and one outlier")]
    DegenerateMask,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },

    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dim(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
