use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A character other than '0', '1' or whitespace in a text sequence.
    #[error("invalid character {found:?} at position {position}")]
    Format { position: usize, found: char },

    #[error("malformed packed sequence: {0}")]
    Packed(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A floor decision that could not be certified within the coefficient budget.
    #[error(
        "precision budget of {budget} continued-fraction coefficients exhausted at index {index}"
    )]
    Precision { index: u64, budget: usize },

    #[error("zero probability at bit index {index}")]
    ZeroProbability { index: usize },

    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn descriptor(msg: impl Into<String>) -> Self {
        Error::Descriptor(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
