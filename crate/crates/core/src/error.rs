use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input or violated precondition.
    #[error("invalid input: {0}")]
    Domain(String),
    /// A bound was requested outside the hypotheses under which it holds.
    #[error("{bound}: precondition violated: {detail}")]
    Precondition { bound: &'static str, detail: String },
    /// A numerical routine failed an internal consistency check.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
