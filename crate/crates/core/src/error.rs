use thiserror::Error;

/// Invalid system description.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("system must have at least one state")]
    NoStates,
    #[error("edge ({tail}, {head}) refers to a state outside 0..{n_states}")]
    StateOutOfRange {
        tail: usize,
        head: usize,
        n_states: usize,
    },
    #[error("duplicate edge ({tail}, {head})")]
    DuplicateEdge { tail: usize, head: usize },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Malformed numeric literal or document.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    System(#[from] SystemError),
}

impl ParseError {
    pub(crate) fn number(s: &str) -> Self {
        ParseError::Number(s.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("measure weights must be non-negative and sum to 1")]
    NotProbability,
    #[error("expected {expected} weights, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeaError {
    /// The graph is acyclic, so the orbit space is empty and every average is -inf.
    #[error("system has no directed cycle (orbit space is empty)")]
    NoCycle,
    #[error("no path of length {0} exists")]
    NoPath(usize),
    #[error("brute force limited to {limit} states, got {n_states}")]
    TooLarge { n_states: usize, limit: usize },
    #[error("function length {found} does not match {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubactionError {
    /// Value iteration did not stabilize: some cycle has positive reduced weight,
    /// which means the supplied beta is below the true maximum.
    #[error("reduced weights contain a positive cycle (still improving at state {state} after {rounds} rounds); beta is too small")]
    PositiveCycle { state: usize, rounds: usize },
    #[error("edge {edge} ({tail} -> {head}) violates the cohomological inequality by {excess}")]
    ViolatedEdge {
        edge: usize,
        tail: usize,
        head: usize,
        excess: f64,
    },
    #[error("maximizing cycle edge {edge} is not tight (slack {slack})")]
    NotTight { edge: usize, slack: f64 },
    #[error(transparent)]
    Mea(#[from] MeaError),
}
