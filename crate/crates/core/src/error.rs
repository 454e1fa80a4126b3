use thiserror::Error;

/// Unified error type for every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("invalid url {url:?}: {message}")]
    InvalidUrl { url: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    /// The page parsed but no content block survived boilerplate removal.
    #[error("extraction produced no content")]
    ExtractionEmpty,

    /// The page could not be decoded or parsed at all.
    #[error("extraction failed: {0}")]
    ExtractionFailed(String),

    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn stage(stage: &str, message: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            message: message.into(),
        }
    }
}
