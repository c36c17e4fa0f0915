use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("construction stopped after {achieved} knot(s): {reason}")]
    Construction { achieved: usize, reason: String },
    #[error("parse error at `{token}` (offset {offset}): {message}")]
    Parse {
        token: String,
        offset: usize,
        message: String,
    },
    #[error("unknown sequence id `{0}`")]
    UnknownSequence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
