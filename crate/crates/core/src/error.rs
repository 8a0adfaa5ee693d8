use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed corpus {path}: {message}")]
    Corpus { path: PathBuf, message: String },

    #[error("malformed corpus {path}: record {index}: {message}")]
    CorpusRecord {
        path: PathBuf,
        index: usize,
        message: String,
    },

    #[error("thesaurus line {line}: {message}")]
    Thesaurus { line: usize, message: String },

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: &'static str },

    #[error("cannot fit a feature space on an empty collection")]
    EmptyCorpus,

    #[error("class {0:?} has no samples")]
    EmptyClass(String),

    #[error("training data needs at least two classes, got {0}")]
    SingleClass(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("test sample reached {stage}: {text:?}")]
    Leakage { stage: &'static str, text: String },

    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("model was built with a different preprocessing configuration")]
    PreprocessingMismatch,

    #[error("{dataset}/{classifier} run {run}: {source}")]
    Cell {
        dataset: String,
        classifier: String,
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
