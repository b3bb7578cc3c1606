use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<String>),
    #[error("missing input {}: run `revise {producer}` first", path.display())]
    MissingInput { path: PathBuf, producer: &'static str },
    #[error("malformed input {}: {reason}", path.display())]
    BadInput { path: PathBuf, reason: String },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::MissingInput { .. } | CliError::BadInput { .. } => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn bad_input(path: &Path, reason: impl ToString) -> Self {
        CliError::BadInput {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        }
    }

    pub fn runtime(reason: impl ToString) -> Self {
        CliError::Runtime(reason.to_string())
    }
}

/// Fails with [`CliError::MissingInput`] unless `path` exists.
pub fn require(path: &Path, producer: &'static str) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::MissingInput {
            path: path.to_path_buf(),
            producer,
        })
    }
}
