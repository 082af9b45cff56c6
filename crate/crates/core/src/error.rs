use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} is out of range for a tree on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("invalid size {0}: must be at least 1")]
    InvalidSize(usize),

    #[error("empty vertex selection")]
    EmptySelection,

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("malformed forest: {0}")]
    MalformedForest(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not a possible cutting sequence: edge at index {index} {reason}")]
    InvalidSequence { index: usize, reason: String },

    #[error("size {n} is not attainable under the offspring law {law}")]
    UnattainableSize { n: usize, law: String },

    #[error("unsupported offspring law: {0}")]
    UnsupportedLaw(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact computation budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("the trace was stopped at a finite horizon; run with an infinite horizon")]
    RequiresInfiniteHorizon,
}
