use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed delimited text: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: header does not match the column map: {detail}")]
    HeaderMismatch { path: PathBuf, detail: String },

    #[error("{path}: {rejected} of {total} rows rejected (more than half)")]
    TooManyRejects {
        path: PathBuf,
        rejected: usize,
        total: usize,
    },

    #[error(
        "no station survives balanced-panel selection for {start}-{end}; most incomplete: {worst}"
    )]
    EmptyPanel { start: i32, end: i32, worst: String },

    #[error("invalid panel specification: {0}")]
    InvalidPanel(String),

    #[error("sample too small: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series are not aligned: {0}")]
    Misaligned(String),

    #[error("covariance of the restricted slopes is singular")]
    Singular,

    #[error("regressor has zero variance")]
    ZeroVariance,
}
