use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmcError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("unknown cell {id:?} in dimension {dim}")]
    UnknownCell { dim: usize, id: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, OmcError>;

impl From<serde_json::Error> for OmcError {
    fn from(e: serde_json::Error) -> Self {
        OmcError::Schema(e.to_string())
    }
}

impl From<std::io::Error> for OmcError {
    fn from(e: std::io::Error) -> Self {
        OmcError::Io(e.to_string())
    }
}
