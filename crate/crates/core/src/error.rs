use thiserror::Error;

/// Errors reported by the library.
///
/// Resource errors are kept apart from input errors so that callers can tell
/// "this could not be computed" from "this was asked incorrectly".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rule table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },

    #[error("rule table entry {index} is {value}, but the rule has only {states} states")]
    StateOutOfRange {
        index: usize,
        value: u32,
        states: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{what} needs {required} bytes, over the budget of {budget} bytes")]
    Budget {
        what: String,
        required: u128,
        budget: u64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for errors caused by the memory or enumeration budget.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
