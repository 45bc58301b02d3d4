use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Model construction failed; the message names the violated invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An operation precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Subset-enumerating operations are capped to avoid 2^k blowup.
    #[error("operation enumerates 2^k subsets and is limited to k <= {limit}, got k = {k}")]
    TooManyParts { k: usize, limit: usize },

    /// The numeric solver only handles small dimensions.
    #[error("numeric path supports k <= {limit}, got k = {k}")]
    DimensionUnsupported { k: usize, limit: usize },

    /// Exact routines are limited to small graphs.
    #[error("{what} requires n <= {limit}, got n = {n}")]
    GraphTooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    /// Every scheduled class target rounded down to the empty set.
    #[error("epsilon schedule infeasible: all class targets rounded to zero")]
    EpsilonInfeasible,

    /// Malformed serialized data (model JSON, graph text format).
    #[error("parse error: {0}")]
    Parse(String),
}
