use thiserror::Error;

/// Errors raised anywhere in the reformulation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input to an operation (wrong degree, missing assignment, ...).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Mathematical domain violation, e.g. division by an exact zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// Interval refinement did not settle within its budget.
    #[error("precision budget exhausted: {0}")]
    Precision(String),

    /// Not enough admissible random sample points could be drawn.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// A component strategy was used outside its preconditions.
    #[error("strategy error: {0}")]
    Strategy(String),

    /// User-supplied data failed a consistency check.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("combinatorial explosion: {count} child problems exceed the limit of {limit}")]
    Explosion { count: usize, limit: usize },

    /// An invariant the code relies on was broken; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
