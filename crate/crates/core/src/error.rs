//! Crate-wide error type.

use crate::embed::EmbedError;

/// Errors raised by parsing, configuration, scoring, and the training loop.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed JSON on an input line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A record or sample violates its schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A configuration value cannot be used (e.g. an invalid pattern).
    #[error("config error: {0}")]
    Config(String),

    /// A reward is undefined for this record (e.g. missing ground truth).
    #[error("scoring error for record {id}: {message}")]
    Scoring { id: String, message: String },

    /// Embedding provider failure.
    #[error(transparent)]
    Embed(#[from] EmbedError),

    /// An error that occurred at a specific simulation step.
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub(crate) fn scoring(id: &str, msg: impl Into<String>) -> Self {
        Error::Scoring {
            id: id.to_string(),
            message: msg.into(),
        }
    }

    /// Wrap an error with the simulation step it occurred at.
    pub fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
