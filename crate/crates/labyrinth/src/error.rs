use thiserror::Error;

use crate::ring::RingSpec;

/// Errors produced by the exact-algebra and maze layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingSpec, RingSpec),
    #[error("{0} is not a field; exact elimination needs a prime modulus")]
    NotAField(RingSpec),
    #[error("unknown element `{0}` in index set")]
    UnknownElement(String),
    #[error("duplicate element `{0}` in index set")]
    DuplicateElement(String),
    #[error("endpoint mismatch: {0}")]
    Endpoints(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("incompatible functor specification: {0}")]
    Incompatible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("vector is not in the span of the given basis")]
    NotInSpan,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
