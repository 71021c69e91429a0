use powertalk_core::Error as CoreError;

/// Failures surfaced by the command line, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Budget(_) => 3,
            _ => 1,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { .. } => AppError::Budget(e.to_string()),
            CoreError::InvalidParameter(_) | CoreError::Schedule(_) => AppError::Config(e.to_string()),
            other => AppError::Runtime(other.to_string()),
        }
    }
}
