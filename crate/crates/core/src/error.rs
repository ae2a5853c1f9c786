use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("truncation radius {radius} exceeds the maximum {max}")]
    RadiusTooLarge { radius: usize, max: usize },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative kernel entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} has zero volume; Markov normalization is undefined")]
    ZeroVolume { row: usize },

    #[error("kernel is not symmetric (max |K - K^T| = {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("basis is not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("coefficient grids are incompatible: {0}")]
    IncompatibleGrids(String),

    #[error("grid {index} has a different shape or mask than the reference grid")]
    MaskMismatch { index: usize },

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("decomposition did not converge: {0}")]
    NoConvergence(String),

    #[error("malformed image {path:?}: {reason}")]
    MalformedImage { path: PathBuf, reason: String },

    #[error("{path:?} is not a grayscale raster (magic {magic:?})")]
    NotGrayscale { path: PathBuf, magic: String },

    #[error("{path:?}: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path:?}: invalid number {token:?} at row {row}, column {col}")]
    InvalidNumber {
        path: PathBuf,
        row: usize,
        col: usize,
        token: String,
    },

    #[error("malformed container: {0}")]
    MalformedContainer(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by bad input data rather than bad arguments or
    /// numerical failures.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NegativeEntry { .. }
                | Error::ZeroVolume { .. }
                | Error::MalformedImage { .. }
                | Error::NotGrayscale { .. }
                | Error::RaggedRow { .. }
                | Error::InvalidNumber { .. }
                | Error::MalformedContainer(_)
                | Error::MaskMismatch { .. }
                | Error::Io(_)
        )
    }

    /// True for violations of a numerical invariant.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ImaginaryResidue { .. }
                | Error::NotOrthonormal { .. }
                | Error::NoConvergence(_)
                | Error::InvariantViolation(_)
        )
    }
}
