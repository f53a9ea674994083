use thiserror::Error;

/// Errors produced by the factorization and diagnostic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A loading or score column collapsed to zero. `component` is zero-based.
    #[error("component {component} is degenerate (all-zero loading or score)")]
    DegenerateComponent { component: usize },

    /// No candidate could explain any remaining variance.
    #[error("data rank exhausted before component {component}")]
    RankExhausted { component: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
