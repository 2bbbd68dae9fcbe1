use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// `Consistency` is reserved for two independent computations that disagree;
/// everything else is a validation or resource problem with the input.
#[derive(Debug, Error)]
pub enum LoopError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LoopError {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            LoopError::Consistency(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LoopError>;

