use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("rank mismatch: {0} vs {1}")]
    Rank(usize, usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("element is not in g: {0}")]
    NotInG(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
