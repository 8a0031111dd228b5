use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("factorization broke down at column {0}")]
    Breakdown(usize),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("matrix market: {0}")]
    MatrixMarket(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
