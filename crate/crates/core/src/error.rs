use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dataset contains no records")]
    EmptyDataset,

    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("line {line}: unknown class label `{token}`")]
    UnknownLabel { line: usize, token: String },

    #[error("column {column} has no observed values to impute from")]
    AllMissingColumn { column: usize },

    #[error("expected {expected} values, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("feature {column} is missing; impute before building a feature matrix")]
    MissingValue { column: usize },

    #[error("invalid convolution kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid pooling configuration: {0}")]
    InvalidPool(String),

    #[error("cannot pool an empty feature map")]
    EmptyMap,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("forward cache was produced by different parameters")]
    StaleCache,

    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("batch is empty")]
    EmptyBatch,

    #[error("training data contains a single class")]
    SingleClassData,

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("non-finite value in solver input")]
    NonFiniteInput,

    #[error("{n} samples cannot be split into {k} folds")]
    TooFewSamples { n: usize, k: usize },

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),

    #[error("line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{failed} of {total} comparison cells failed")]
    ComparisonFailed { failed: usize, total: usize },
}

impl Error {
    /// Errors caused by bad input files or arguments rather than by a failed run.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::EmptyDataset
                | Error::MalformedRow { .. }
                | Error::UnknownLabel { .. }
                | Error::ArityMismatch { .. }
                | Error::ModelFormat { .. }
                | Error::Config(_)
                | Error::InvalidHyperparams(_)
                | Error::InvalidPool(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
