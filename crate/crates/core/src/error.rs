use thiserror::Error;

use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index out of range: {index} not in 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("rewrite budget of {0} steps exceeded")]
    RewriteBudget(usize),
    #[error("Haar solve degenerate: {0}")]
    HaarDegenerate(String),
    #[error("truncation too small: kernel truncated at degree {kernel}, input has degree {input}")]
    TruncationTooSmall { kernel: usize, input: usize },
    #[error("generator z[{col},{row}] is outside the rectangular range rows > {min_row_exclusive}")]
    OutsideRectangle { col: usize, row: usize, min_row_exclusive: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("syntax error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("cache file: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
