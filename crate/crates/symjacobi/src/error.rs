use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge: {what} (achieved tail bound {tail:.3e} at n_max = {n_max})")]
    Convergence {
        what: String,
        tail: f64,
        n_max: usize,
    },
    #[error("accuracy warning: {0}")]
    Accuracy(String),
    #[error("internal numerical failure: {0}")]
    Internal(String),
    #[error("non-finite value at {0}")]
    NonFinite(String),
    #[error("at {location}: {source}")]
    At {
        location: String,
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches the coordinates at which an evaluation failed.
    pub fn at(self, location: impl Into<String>) -> Self {
        Error::At {
            location: location.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
