use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty vocabulary: no tokens survive the document-frequency cutoff")]
    EmptyVocabulary,

    #[error("training error: {0}")]
    Training(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("vocabulary digest mismatch: model expects {expected}, got {actual}")]
    VocabularyMismatch { expected: String, actual: String },

    #[error("brute-force oracle refuses n = {0} (limit is {limit})", limit = crate::mincut::BRUTE_FORCE_LIMIT)]
    OracleTooLarge(usize),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Ingestion(_) => "ingestion",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::EmptyVocabulary => "empty-vocabulary",
            Error::Training(_) => "training",
            Error::DegenerateModel(_) => "degenerate-model",
            Error::VocabularyMismatch { .. } => "vocabulary-mismatch",
            Error::OracleTooLarge(_) => "oracle-too-large",
            Error::Serde(_) => "serde",
        }
    }
}
