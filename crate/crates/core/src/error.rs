use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid length: {0}")]
    InvalidLength(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing source `{label}` in {}", dir.display())]
    MissingSource { label: String, dir: PathBuf },

    #[error("failed to load {}: {reason}", path.display())]
    Load { path: PathBuf, reason: String },

    #[error("malformed data: {0}")]
    Format(String),

    #[error("track `{track}`, source `{source_label}`: {inner}")]
    Track {
        track: String,
        source_label: String,
        #[source]
        inner: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
