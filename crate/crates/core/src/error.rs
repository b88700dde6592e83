use thiserror::Error;

use crate::dynamics::Overflow;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Overflow(#[from] Overflow),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Base inequalities `Re z > 1`, `Re w > 1` fail.
    #[error("point is not in any L_alpha (Re z > 1 and Re w > 1 required)")]
    NotInL,

    /// `u_n` has a vanishing denominator `|w_n| + |z_n|`.
    #[error("u_n is undefined at this point")]
    Undefined,

    #[error("only {valid} of {samples} circle samples are defined")]
    InsufficientSamples { valid: usize, samples: usize },

    #[error("orbit overflowed after {completed} of {requested} steps")]
    Truncated { completed: usize, requested: usize },
}
