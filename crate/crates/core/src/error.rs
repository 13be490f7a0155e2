use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element outside group carrier: {0}")]
    DomainError(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("groups do not match: {0}")]
    GroupMismatch(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("normalization violated: mass sums to {0}")]
    Normalization(f64),
    #[error("negative mass {mass} at index {index}")]
    NegativeMass { index: usize, mass: f64 },
    #[error("empty set passed to {0}")]
    EmptySet(&'static str),
    #[error("entropy is -infinity ({0})")]
    NegInfiniteEntropy(String),
    #[error("Markov property violated: conditional mutual information {0} exceeds tolerance")]
    MarkovViolation(f64),
    #[error("matrix is not positive-definite: {0}")]
    NotPositiveDefinite(String),
    #[error("grid resolution error: {0}")]
    Resolution(String),
    #[error("density is not log-concave: {0}")]
    NotLogConcave(String),
    #[error("unknown check name: {0}")]
    UnknownCheck(String),
    #[error("precondition failed for {check}: {reason}")]
    Precondition { check: &'static str, reason: String },
    #[error("malformed input file {path}: {reason}")]
    MalformedFile { path: String, reason: String },
    #[error("search error: {0}")]
    Search(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
