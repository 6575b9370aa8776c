use std::path::Path;

use thiserror::Error;

/// Failures of a CLI run, each mapped to a distinct exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage} failed: {source}")]
    Runtime {
        stage: &'static str,
        #[source]
        source: pmurel_core::Error,
    },

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn runtime(stage: &'static str) -> impl Fn(pmurel_core::Error) -> CliError {
        move |source| CliError::Runtime { stage, source }
    }

    /// 2 for configuration, 3 for numerical/runtime, 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}
