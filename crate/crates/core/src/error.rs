use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid setting: {0}")]
    InvalidSetting(String),
    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),
    #[error("invalid optimizer config: {0}")]
    Config(String),
    #[error("invalid counts: {0}")]
    Counts(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
