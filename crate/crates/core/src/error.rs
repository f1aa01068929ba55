use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("instance has no features")]
    EmptyFeatures,

    #[error("non-finite feature value at position {position}")]
    NonFinite { position: usize },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },

    #[error("{0}: stream is empty")]
    EmptyStream(PathBuf),

    #[error("instance at time index {time_index} has no label")]
    Unlabeled { time_index: u64 },

    #[error("scaler has not seen any instance")]
    EmptyScaler,

    #[error("value {value} outside [0, 1]")]
    OutOfRange { value: f64 },

    #[error("feature position {position} is not available (dimension {dimension})")]
    MissingFeature { position: usize, dimension: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
