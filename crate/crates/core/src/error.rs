use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The adaptive-precision ladder hit its cap without resolving a floor
    /// or comparison. Carries the cap (in bits) that was reached.
    #[error("precision ladder exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },

    /// A per-run cost budget would be exceeded.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A parameter is outside the documented domain of an operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
