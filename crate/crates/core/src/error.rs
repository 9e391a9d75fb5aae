use thiserror::Error;

/// Errors produced by the dual-basis MDS toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The squared-distance matrix fails the Schoenberg test beyond tolerance.
    #[error("matrix is not a squared Euclidean distance matrix (minimum Gram eigenvalue {min_eigenvalue:e})")]
    NonEuclidean { min_eigenvalue: f64 },

    /// A dense allocation would exceed the configured cap.
    #[error("dense {what} of dimension {dim} exceeds the cap of {cap}")]
    Resource {
        what: &'static str,
        dim: usize,
        cap: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!(),
            }
        } else {
            Error::Parse(err.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
