use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the needlet pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("index {index} out of range for {len} points")]
    Index { index: usize, len: usize },

    #[error("harmonic convention violated: imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ConventionViolation { residue: f64, tolerance: f64 },

    #[error("scale {j}: every needlet coefficient is excluded by the mask threshold")]
    AllMasked { j: i32 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
