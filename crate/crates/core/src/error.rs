use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of a criterion (strict positivity, finite tail mass, ...) fails.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A numerical routine failed; `partial` is the best value reached.
    #[error("numeric failure: {message} (partial value {partial})")]
    Numeric { message: String, partial: f64 },

    #[error("unsupported comparison: {0}")]
    UnsupportedComparison(String),

    /// The network or linear system is structurally unusable.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("step cap of {cap} reached before the walk returned to the even lattice")]
    CapHit { cap: u64 },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
