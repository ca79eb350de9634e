use thiserror::Error;

/// Errors raised by state construction, entropy evaluation and protocol simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("label collision: {0}")]
    Composition(String),
    #[error("layout error: {0}")]
    Layout(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("wrong state kind: {0}")]
    Kind(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("support condition violated: {0}")]
    Support(String),
    #[error("scale cap exceeded: {0}")]
    Scale(String),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("out of scope: {0}")]
    Scope(String),
}

pub type Result<T> = std::result::Result<T, Error>;
