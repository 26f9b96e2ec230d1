use thiserror::Error;

/// Error taxonomy shared by every module. The variants map onto the CLI
/// exit codes: domain-style failures exit 1, budget failures exit 2,
/// network failures exit 3, usage failures exit 64.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request exceeds the configured desk-scale budget.
    #[error("budget error: {0}")]
    Budget(String),

    /// HTTP transport failure after retries.
    #[error("network error: {0}")]
    Network(String),

    /// Payload did not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Data failed an invariant re-check and was rejected.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A source does not carry enough coefficients or zeros.
    #[error("insufficient data: {0}")]
    Insufficient(String),

    /// Zero counting failed to stabilize under refinement.
    #[error("unstable count: {0}")]
    UnstableCount(String),

    /// The splitting construction produced no valid witness. Firing this
    /// under the documented preconditions is a bug, not a data condition.
    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) => 2,
            Error::Network(_) | Error::Schema(_) => 3,
            Error::Usage(_) => 64,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
