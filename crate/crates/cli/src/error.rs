use std::path::PathBuf;

use physiosel_core::Error as CoreError;
use thiserror::Error;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}:{line}: parse error: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },
    #[error("missing output of the '{stage}' stage: {path} (run `physiosel {stage}` first)")]
    Dependency { stage: &'static str, path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) | CliError::Parse { .. } | CliError::Dependency { .. } | CliError::Io { .. } => EXIT_DATA,
            CliError::Core(e) => match e {
                CoreError::Config(_) => EXIT_CONFIG,
                CoreError::Numeric { .. } | CoreError::Rank(_) | CoreError::Contract(_) => EXIT_NUMERIC,
                _ => EXIT_DATA,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
