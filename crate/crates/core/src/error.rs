use thiserror::Error;

/// Errors produced by trackscore operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two tensors (or paths) with incompatible shapes were combined.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Inversion requested for an element whose level-0 coefficient is too small.
    #[error("element is not invertible: level-0 coefficient {0:e}")]
    NotInvertible(f64),

    /// An action was supplied that does not lie in the unital slice.
    #[error("element is not unital: level-0 coefficient {0}")]
    NotUnital(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed input data, with the 1-based line it was found on.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("sampler failure: {0}")]
    Sampler(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
