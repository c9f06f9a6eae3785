use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed at x = {x}: {source}")]
    Eval { x: f64, source: EvalError },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("root bracket not found: {0}")]
    BracketNotFound(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("scenario error: {0}")]
    Scenario(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
