use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("strategy exhausted: no component left to update")]
    StrategyExhausted,

    #[error("invalid iteration graph: {0}")]
    InvalidGraph(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("Markov chain is not regular (reducible)")]
    NotRegular,

    #[error("Markov chain does not mix: {0}")]
    NotMixing(String),

    #[error("invalid generator state: {0}")]
    InvalidState(String),

    #[error("insufficient data for {test}: need at least {needed} bits, got {got}")]
    InsufficientData {
        test: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
