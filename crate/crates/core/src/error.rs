use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense operation would exceed the configured qubit cap.
    #[error("resource error: {n} qubits exceeds dense cap of {cap}")]
    Resource { n: usize, cap: usize },

    /// The circuit needs more ansatz layers than the budget allows.
    #[error("capacity error: circuit needs {required} layers, budget is {budget}")]
    Capacity { required: usize, budget: usize },

    /// A circuit, parameter or dataset document could not be read.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
