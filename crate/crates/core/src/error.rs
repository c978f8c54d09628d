use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported cycle length {0}: products need k >= 3")]
    UnsupportedCycleLength(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size limit exceeded for {what}: {got} > {limit}")]
    SizeLimit { what: &'static str, limit: usize, got: usize },
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
