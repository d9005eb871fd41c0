use thiserror::Error;

use crate::machine::DivergenceWitness;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("alphabet collision on `{0}`")]
    AlphabetCollision(String),

    #[error("alphabets do not match: {0}")]
    AlphabetMismatch(String),

    #[error("init word carries two entry labels: {0}")]
    AmbiguousEntry(String),

    #[error("non-reading run diverged: {0}")]
    DivergenceDetected(DivergenceWitness),

    #[error("machine failed validation:\n{0}")]
    Validation(String),

    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),

    #[error("incompatible parameters: {0}")]
    IncompatibleParameters(String),

    #[error("letter `{0}` has no inverse generator data")]
    MissingInverse(String),

    #[error("letter `{0}` maps to an empty word")]
    EmptyReplacement(String),

    #[error("rewrite table incomplete: {0}")]
    TableIncomplete(String),

    #[error("invalid generator data: {0}")]
    InvalidGenerator(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
