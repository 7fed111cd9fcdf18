use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("interval total {total} exceeds the 32-bit coder precision")]
    PrecisionOverflow { total: u64 },

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("invalid symbol {0}: message symbols must lie in 1..=2^62")]
    InvalidSymbol(u64),

    #[error("message length {len} exceeds the supported maximum {max}")]
    LengthLimitExceeded { len: usize, max: usize },

    #[error("rank {rank} out of range 0..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("sum over the source support does not converge: {0}")]
    UnboundedSum(String),

    #[error("lemma violated: {lemma} (lhs {lhs}, rhs {rhs})")]
    LemmaViolation { lemma: String, lhs: f64, rhs: f64 },

    #[error("bound violated: {bound} (lhs {lhs}, rhs {rhs})")]
    BoundViolation { bound: String, lhs: f64, rhs: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
