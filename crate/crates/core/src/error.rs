use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("cone has nontrivial lineality")]
    NotPointed,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("{0}")]
    Geometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn pre<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn check_rank(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::RankMismatch { expected, got })
    }
}
