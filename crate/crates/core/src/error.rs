use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("malformed automaton: {0}")]
    Malformed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("word {0:?} is not in the domain")]
    Domain(String),

    #[error("binding error: {0}")]
    Binding(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}
