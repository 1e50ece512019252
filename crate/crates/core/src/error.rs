use thiserror::Error;

/// Errors raised by game construction, evaluation, learners and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} needs {needed} evaluations, above the cap of {cap}")]
    SizeCap { what: String, needed: u128, cap: u128 },

    #[error("round {round} is beyond the horizon {horizon}")]
    BeyondHorizon { round: usize, horizon: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for refusals caused by enumeration caps rather than bad input.
    pub fn is_size_cap(&self) -> bool {
        matches!(self, Error::SizeCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
