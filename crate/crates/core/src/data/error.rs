use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot open `{}`: {source}", path.display())]
    Open { path: PathBuf, source: io::Error },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid header: {0}")]
    Header(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("batch size must be at least one")]
    ZeroBatchSize,
}

/// Failure of a batch stream: either reading/parsing the data, or the task
/// applied to a batch.
#[derive(Debug)]
pub enum StreamError<E> {
    Data(DataError),
    Task { origin: u64, error: E },
}

impl<E: fmt::Display> fmt::Display for StreamError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamError::Data(e) => e.fmt(f),
            StreamError::Task { origin, error } => {
                write!(f, "batch starting at record {origin}: {error}")
            }
        }
    }
}

impl<E: std::error::Error + 'static> std::error::Error for StreamError<E> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            StreamError::Data(e) => Some(e),
            StreamError::Task { error, .. } => Some(error),
        }
    }
}

impl<E> From<DataError> for StreamError<E> {
    fn from(e: DataError) -> Self {
        StreamError::Data(e)
    }
}
