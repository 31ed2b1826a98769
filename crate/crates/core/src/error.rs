use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading, validating, or evaluating namecat data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("empty query: nothing left to classify after normalization")]
    EmptyQuery,

    #[error("model set is empty")]
    NoModels,

    #[error("duplicate model label `{0}`")]
    DuplicateLabel(String),

    #[error("model `{label}` uses n-gram range {found:?}, expected {expected:?}")]
    MismatchedRange {
        label: String,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("alias `{alias}` points at `{target}`, which is itself an alias")]
    AliasChain { alias: String, target: String },

    #[error("language `{language}` has {count} examples, fewer than k = {k}")]
    TooFewExamples {
        language: String,
        count: usize,
        k: usize,
    },

    #[error("no training data: {0}")]
    EmptyTraining(String),

    #[error("no language survived corpus construction")]
    EmptyCorpus,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        origin: impl Into<String>,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            origin: origin.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
