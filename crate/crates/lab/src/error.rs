use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const BUDGET: i32 = 2;
    pub const PROPERTY_FAILED: i32 = 3;
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] ramsey_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config file {path}: line {line}: {msg}")]
    Config { path: String, line: usize, msg: String },
    #[error("usage: {0}")]
    Usage(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        use ramsey_core::Error as E;
        match self {
            LabError::Core(E::BudgetExceeded { .. } | E::NodeBudgetExceeded { .. } | E::Cancelled { .. } | E::CeilingReached { .. }) => {
                exit::BUDGET
            }
            LabError::Core(E::Numeric(_)) => exit::PROPERTY_FAILED,
            LabError::Core(_) | LabError::Config { .. } | LabError::Usage(_) => exit::USAGE,
            LabError::Io(_) | LabError::Json(_) | LabError::Csv(_) => exit::USAGE,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
