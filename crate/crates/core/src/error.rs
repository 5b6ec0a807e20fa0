use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("lattice tail not summable: decay exponent {decay} must exceed {needed}")]
    TailNotSummable { decay: f64, needed: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("integration became unstable at t = {t}")]
    Unstable { t: f64 },
    #[error("refused: {0}")]
    Refused(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
