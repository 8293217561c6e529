use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(
        "invalid candidate name {0:?}: must be a nonempty token without whitespace, '>' or ','"
    )]
    InvalidCandidateName(String),

    #[error("duplicate candidate {0}")]
    DuplicateCandidate(String),

    #[error("unknown candidate {0}")]
    UnknownCandidate(String),

    #[error("candidates must be distinct, got {0} twice")]
    IdenticalPair(String),

    #[error("ballot is not a permutation of the candidate set: {0}")]
    MalformedBallot(String),

    #[error("election must have at least one candidate")]
    NoCandidates,

    #[error("operation requires at least {need} candidates, got {got}")]
    TooFewCandidates { need: usize, got: usize },

    #[error(
        "margin residual between {c} and {d} is odd ({residual}); not realizable by vote pairs"
    )]
    ParityMismatch { c: String, d: String, residual: i64 },

    #[error("margin matrix is not antisymmetric at ({c}, {d})")]
    NotAntisymmetric { c: String, d: String },

    #[error("name collision: {0} already present")]
    NameCollision(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid control instance: {0}")]
    InvalidInstance(String),

    #[error("search space too large: estimated {estimate} actions exceeds guard {guard} (raise the guard or force to override)")]
    SearchSpaceExceeded { estimate: u128, guard: u64 },

    #[error("no vertex cut exists: direct edge {s} -> {t}")]
    UncuttableEdge { s: String, t: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
