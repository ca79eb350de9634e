use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lib(#[from] mergelab::Error),
}

impl CliError {
    /// 2 for failed checks, 3 for everything the caller can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 2,
            _ => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
