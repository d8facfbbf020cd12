//! Command implementations behind the CLI binary. Each command returns
//! `Result<(), CliError>`; the binary maps errors to exit codes and a
//! single JSON error object on stderr.

pub mod bench;
pub mod costmodel;
pub mod eval;
pub mod gen_corpus;
pub mod run;

use thiserror::Error;

use crate::costmodel::CostModelError;
use crate::geometry::GeometryError;
use crate::manifest::ManifestError;
use crate::metrics::MetricsError;
use crate::pipeline::{ConfigError, PipelineError};

/// Exit code on usage or configuration errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit code on runtime stage failures.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation, unreadable config or invalid input data → exit 2.
    #[error("{0}")]
    Usage(String),
    /// The pipeline or a stage failed at runtime → exit 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Runtime(_) => "runtime",
        }
    }

    /// The machine-readable error object printed to stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.to_string(),
            "kind": self.kind(),
            "exit": self.exit_code(),
        })
        .to_string()
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CostModelError> for CliError {
    fn from(e: CostModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        // bad evaluation inputs (single class, length mismatch) are usage
        // errors, not stage failures
        CliError::Usage(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(c) => CliError::Usage(c.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub(crate) fn write_file(path: &std::path::Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents.as_ref())?;
    Ok(())
}
