use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Dense representation would not fit (n too large for the chosen mode).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A parameter choice admits no solution (e.g. no feasible tail constant,
    /// rejection acceptance below the floor, certificate precondition violated).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A protocol communicated more than it declared.
    #[error("protocol contract violation: {0}")]
    ContractViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
