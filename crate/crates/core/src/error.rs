use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line-oriented input file could not be parsed.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: [usize; 2],
        right: [usize; 2],
    },

    #[error("sentence {sentence}, token {token}: lemma is absent")]
    MissingLemma { sentence: usize, token: usize },

    #[error("tokenization mismatch at sentence {sentence}, token {token}: {detail}")]
    TokenizationMismatch {
        sentence: usize,
        token: usize,
        detail: String,
    },

    #[error("backward has already been run on this graph")]
    BackwardTwice,

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(
        "autoencoder coverage needs at least {alphabet} strings \
         (one per alphabet character), got {requested}"
    )]
    Coverage { requested: usize, alphabet: usize },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    /// An I/O failure on a named file.
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
}

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Shape { .. } => "shape",
            Error::MissingLemma { .. } => "missing_lemma",
            Error::TokenizationMismatch { .. } => "tokenization",
            Error::BackwardTwice => "backward_twice",
            Error::ModelFormat(_) => "model_format",
            Error::Coverage { .. } => "coverage",
            Error::Invalid(_) => "invalid",
            Error::Io(_) | Error::File { .. } => "io",
        }
    }
}
