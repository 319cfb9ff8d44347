//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, TtgoError>;

#[derive(Debug, Error)]
pub enum TtgoError {
    /// Grid construction rejected (too few nodes, non-increasing nodes, ...).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Multi-index component outside the grid.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Non-finite input where a finite value is required.
    #[error("invalid value: {0}")]
    InvalidValue(String),

    /// Tensor-train rank chain or core shapes are inconsistent.
    #[error("malformed model: {0}")]
    MalformedModel(String),

    /// Maxvol could not find a nonsingular pivot submatrix.
    #[error("pivot failure: {0}")]
    PivotFailure(String),

    /// An oracle returned a non-finite value.
    #[error("non-finite oracle value at index {index:?}")]
    PoisonedEvaluation { index: Vec<usize> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Conditioning on every dimension leaves no free variables.
    #[error("conditioning on all {0} dimensions leaves an empty model")]
    EmptyConditionedModel(usize),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Model-file decoding failures, one variant per distinct condition.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes (not a model file)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    CrcMismatch { stored: u32, computed: u32 },
    #[error("file truncated or declared sizes disagree with payload: {0}")]
    Truncated(String),
    #[error("inconsistent header: {0}")]
    Inconsistent(String),
    #[error("unknown transform id {0}")]
    UnknownTransform(u8),
}

impl TtgoError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TtgoError::Io {
            path: path.into(),
            source,
        }
    }
}
