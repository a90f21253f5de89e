use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An input file or string failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Two inputs disagree on a dimension (node count, feature count, ...).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The spectral embedding cannot be formed.
    #[error("degenerate Laplacian: {0}")]
    DegenerateLaplacian(String),

    /// An exhaustive search was asked to enumerate too many labelings.
    #[error("instance too large for exhaustive search: n = {n} exceeds max_n = {max_n}")]
    TooLarge { n: usize, max_n: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
