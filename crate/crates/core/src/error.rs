use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no grammar for language `{0}`")]
    UnsupportedLanguage(String),
    #[error("source text is empty")]
    EmptySource,
    #[error("grammar could not produce a syntax tree for `{0}`")]
    ParseFailure(String),

    #[error("no embedding for `{0}` in the embedding table")]
    MissingEmbedding(String),
    #[error("text produced an all-zero embedding")]
    ZeroVector,
    #[error("dimension mismatch for `{id}`: expected {expected}, found {found}")]
    DimMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("malformed file at line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },

    #[error("empty input")]
    EmptyInput,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty batch")]
    EmptyBatch,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite loss in batch {batch} of epoch {epoch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("every snippet failed to encode ({0} snippets)")]
    AllSnippetsFailed(usize),
    #[error("index was built with a different configuration\n  index: {index}\n  query: {query}")]
    FingerprintMismatch { index: String, query: String },
    #[error("ground-truth id `{0}` is not in the index")]
    MissingGroundTruth(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("all {0} lines are malformed")]
    AllLinesMalformed(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("snippet `{id}`: {source}")]
    Snippet {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnsupportedLanguage(_) => "UnsupportedLanguage",
            Error::EmptySource => "EmptySource",
            Error::ParseFailure(_) => "ParseFailure",
            Error::MissingEmbedding(_) => "MissingEmbedding",
            Error::ZeroVector => "ZeroVector",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::MalformedFile { .. } => "MalformedFile",
            Error::EmptyInput => "EmptyInput",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::EmptyBatch => "EmptyBatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFiniteLoss { .. } => "NonFiniteLoss",
            Error::AllSnippetsFailed(_) => "AllSnippetsFailed",
            Error::FingerprintMismatch { .. } => "FingerprintMismatch",
            Error::MissingGroundTruth(_) => "MissingGroundTruth",
            Error::DuplicateId(_) => "DuplicateId",
            Error::FileNotFound(_) => "FileNotFound",
            Error::AllLinesMalformed(_) => "AllLinesMalformed",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Snippet { source, .. } => source.code(),
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    pub(crate) fn for_snippet(id: &str, err: Error) -> Error {
        match err {
            e @ Error::Snippet { .. } => e,
            e => Error::Snippet {
                id: id.to_string(),
                source: Box::new(e),
            },
        }
    }
}
