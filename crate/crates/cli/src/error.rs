use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ideal_core::Error),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed run directory {path}: {message}")]
    RunDir { path: PathBuf, message: String },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// The JSON object written to stderr when a command fails.
#[derive(Debug, Serialize)]
pub struct ErrorRecord<'a> {
    pub status: &'static str,
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    pub command: &'a str,
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn run_dir(path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        CliError::RunDir {
            path: path.as_ref().to_path_buf(),
            message: message.into(),
        }
    }

    /// 2 for bad input (including a path that does not exist), 1 for runtime
    /// failures.
    pub fn exit_code(&self) -> i32 {
        let not_found = |e: &std::io::Error| e.kind() == std::io::ErrorKind::NotFound;
        match self {
            CliError::Core(e) if e.is_usage() => 2,
            CliError::Core(ideal_core::Error::Io { source, .. }) if not_found(source) => 2,
            CliError::Io { source, .. } if not_found(source) => 2,
            CliError::Core(_) | CliError::Io { .. } => 1,
            CliError::Config(_) | CliError::RunDir { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        use ideal_core::Error as E;
        match self {
            CliError::Core(E::Parse { .. }) => "parse",
            CliError::Core(E::Validation(_)) => "validation",
            CliError::Core(E::Domain(_)) => "domain",
            CliError::Core(E::DegenerateData(_)) => "degenerate-data",
            CliError::Core(E::Unsupported(_)) => "unsupported",
            CliError::Core(E::LinearAlgebra(_)) => "linear-algebra",
            CliError::Core(E::Io { .. }) | CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::RunDir { .. } => "run-directory",
        }
    }

    pub fn record<'a>(&self, command: &'a str) -> ErrorRecord<'a> {
        ErrorRecord {
            status: "error",
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            command,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let usage = CliError::Core(ideal_core::Error::Validation("x".into()));
        assert_eq!(usage.exit_code(), 2);
        let runtime = CliError::io("/nope", std::io::Error::other("boom"));
        assert_eq!(runtime.exit_code(), 1);
        let algebra = CliError::Core(ideal_core::Error::LinearAlgebra("x".into()));
        assert_eq!(algebra.exit_code(), 1);
    }

    #[test]
    fn record_serializes() {
        let e = CliError::Config("missing".into());
        let json = serde_json::to_string(&e.record("fit")).unwrap();
        assert!(json.contains("\"exit_code\":2"));
        assert!(json.contains("\"kind\":\"config\""));
    }
}
