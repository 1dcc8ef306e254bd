use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("ambient vertex counts differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph is too large: {0}")]
    TooLarge(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("not a subgraph: {0}")]
    NotSubgraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("exact arithmetic unavailable: {0}")]
    Inexact(String),
    #[error("null measure has no mass where the planted measure does: {0}")]
    Degenerate(String),
    #[error("advantage is unbounded: {0}")]
    Unbounded(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
