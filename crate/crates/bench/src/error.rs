use hbs_core::HbsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Hbs(#[from] HbsError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid factorization file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit status: 2 for bad configuration, 3 for ill-conditioned probes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Hbs(HbsError::Config(_)) => 2,
            BenchError::Hbs(HbsError::IllConditioned { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
