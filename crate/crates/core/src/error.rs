use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown label `{label}`")]
    OutOfVocabulary { line: usize, label: String },

    #[error("dataset contains no triples")]
    EmptyDataset,

    #[error("store already carries reciprocal relations")]
    AlreadyAugmented,

    #[error("vocabulary mismatch: {0}")]
    VocabMismatch(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has no edges")]
    NoEdges,

    #[error("node {0} has no neighbors")]
    IsolatedNode(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid sampling weights: {0}")]
    InvalidWeights(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("walk corpus is empty")]
    EmptyCorpus,

    #[error("{kind} id {id} out of range (size {size})")]
    IdOutOfRange {
        kind: &'static str,
        id: usize,
        size: usize,
    },

    #[error("non-finite gradient in parameter block `{0}`")]
    NonFiniteGradient(&'static str),

    #[error("batch is empty")]
    EmptyBatch,

    #[error("true tail {tail} is missing from the filter set")]
    TailNotInFilter { tail: usize },

    #[error("score of entity {tail} is not finite")]
    NonFiniteScore { tail: usize },

    #[error("model has {actual} relations but evaluation needs {expected} (base plus reciprocal)")]
    MissingReciprocal { expected: usize, actual: usize },

    #[error("input has zero variance")]
    ZeroVariance,

    #[error("format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Path {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn at_path(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Path {
            path: path.into(),
            source,
        }
    }
}
