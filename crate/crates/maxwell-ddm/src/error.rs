//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid mesh or geometry input (non-positive lengths, out-of-range
    /// indices, a material box reaching into the PML collar, ...).
    #[error("geometry: {0}")]
    Geometry(String),

    /// Invalid physics parameters.
    #[error("physics: {0}")]
    Physics(String),

    /// Assembly-time inconsistency between mesh, profiles and face conditions.
    #[error("assembly: {0}")]
    Assembly(String),

    /// Invalid decomposition request.
    #[error("decomposition: {0}")]
    Decomposition(String),

    /// Sparse factorization failure, e.g. a structurally singular matrix or
    /// a zero pivot.
    #[error("factorization breakdown: {0}")]
    Breakdown(String),

    /// Configuration file parse error, annotated with a 1-based line number.
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// Semantic validation error of a parsed configuration.
    #[error("config: {0}")]
    ConfigInvalid(String),

    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
