use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is not a prime modulus")]
    NotPrime(u32),

    #[error("capacity exceeded: {what} needs {needed} entries, limit is {limit}")]
    Capacity { what: &'static str, needed: u128, limit: u128 },

    #[error("not a stabilizer: generators {0} and {1} do not commute")]
    NotStabilizer(usize, usize),

    #[error("generators are linearly dependent (rank {rank} < {count})")]
    Rank { rank: usize, count: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("detected error has no logical class: vector is not in the normalizer")]
    NoLogicalClass,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported iteration: {0}")]
    UnsupportedIteration(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
