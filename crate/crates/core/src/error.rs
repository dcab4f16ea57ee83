use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed SGML at byte {offset}: {message}", path.display())]
    Sgml {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown word: {0:?}")]
    UnknownWord(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands are defined over different vocabularies")]
    VocabularyMismatch,

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("space has no positive eigenvalue; it cannot be normalized into a density")]
    DegenerateSpace,

    #[error("degenerate collapse: <v|M|v> = {normalizer:e} is not positive")]
    DegenerateCollapse { normalizer: f64 },

    #[error("state is orthogonal to the context subspace (|Pv| = {norm:e})")]
    OrthogonalContext { norm: f64 },

    #[error("iterative eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error("archive format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("archive corrupted at line {line}: {message}")]
    Corruption { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::Parameter(message.into())
    }
}
