use specloc_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model validation: {0}")]
    Model(String),
    #[error("not an insulator: spectral gap {gap:.3e} below tolerance {tol:.1e}")]
    NotInsulator { gap: f64, tol: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("basis mismatch: {0}")]
    Basis(String),
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
