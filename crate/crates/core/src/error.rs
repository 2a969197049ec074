use thiserror::Error;

/// Errors produced by the arithmetic, congruence, and race machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (e.g. factorizing 0, a congruence modulus of 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold (e.g. an envelope grid
    /// point below 1000, a non-ascending grid).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Checked integer or rational arithmetic overflowed.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// A sieve segment or range request exceeds the configured capacity.
    #[error("capacity exceeded: requested {requested}, limit {limit}")]
    Capacity { requested: u64, limit: u64 },

    /// Invalid runtime configuration (e.g. a malformed SIGMA_RACE_THREADS).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
