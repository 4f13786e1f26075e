//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error enum. Variants are grouped by who is at fault:
/// configuration mistakes, bad input data, contract/state violations
/// inside the library, and numeric failures during optimization or
/// training.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or configuration (caller-fixable).
    #[error("configuration error: {0}")]
    Config(String),

    /// Problems with the input data itself.
    #[error("data error: {0}")]
    Data(String),

    /// An operation was invoked on a state that does not satisfy its
    /// precondition (e.g. roles requested before fitness evaluation).
    #[error("state error: {0}")]
    State(String),

    /// A value violated an internal contract (e.g. a position component
    /// outside the unit box handed to the binarizer).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The objective returned a non-finite value for some position.
    #[error("evaluation error: objective returned {value} for squirrel {index} at {position:?}")]
    Evaluation {
        index: usize,
        position: Vec<f64>,
        value: f64,
    },

    /// Numeric failure during classifier training.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
