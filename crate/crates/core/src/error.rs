use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("instance too large for this operation: {0}")]
    TooLarge(String),

    #[error("reference value must be non-zero")]
    ZeroReference,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
