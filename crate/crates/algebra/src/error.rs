use glfour_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("index error: {0}")]
    Index(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("unsupported operator term: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
