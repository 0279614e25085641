use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircleError {
    #[error("a system needs at least one branch")]
    NoBranches,
    #[error("branch {index}: {reason}")]
    InvalidBranch { index: usize, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    /// Two branches take the same value somewhere on their common domain.
    #[error("branches {i} and {j} are not separated")]
    NotExpanding { i: usize, j: usize },
    #[error("period {requested} exceeds the limit {limit}")]
    PeriodTooLarge { requested: usize, limit: usize },
    #[error("grid size {0} is below the minimum of 8")]
    GridTooSmall(usize),
    #[error("observable `{0}` has no Lipschitz constant, so no rigorous upper bound exists")]
    MissingLipschitz(String),
    #[error("no periodic orbit up to the requested period")]
    NoOrbit,
}
