use std::path::PathBuf;

/// Errors raised by the core engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("unsupported {what} format version {found} (expected {expected})")]
    FormatVersion {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("corpus contains no source files")]
    EmptyCorpus,

    #[error("invalid timestamp {0:?}")]
    InvalidTimestamp(String),

    #[error("invalid bug report {id}: {reason}")]
    InvalidReport { id: String, reason: String },

    #[error("LLM provider failed: {message}")]
    Provider { message: String, retriable: bool },

    #[error("LLM reply contained no usable entities")]
    ReplyUnparseable,

    #[error("every query entity was pruned during validation")]
    EmptyQueryAfterValidation,

    #[error("reformulation limit of {max_cycles} cycle(s) reached")]
    SessionExhausted { max_cycles: u32 },

    #[error("invalid feedback: {0}")]
    InvalidFeedback(String),

    #[error("no ranking pairs can be formed from the training data")]
    TrainingDataDegenerate,

    #[error("model has no weights for category {0}")]
    MissingCategoryModel(String),

    #[error("nothing to evaluate: {0}")]
    EmptyEvaluation(String),

    #[error("no corpus ingested for {project}/{version}")]
    UnknownCorpus { project: String, version: String },

    #[error("no session {0}")]
    SessionNotFound(String),

    #[error("session {0} is busy with another request")]
    SessionBusy(String),

    #[error("session {id} is {status} and accepts no further changes")]
    SessionClosed { id: String, status: String },

    #[error("file {0} is not in the latest top 10")]
    NotInTopTen(u32),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    /// Whether retrying the same call may succeed.
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Provider { retriable: true, .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
