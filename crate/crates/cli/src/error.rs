use std::path::PathBuf;

use advrobust_core::Error as CoreError;

/// Command failures, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("data: {0}")]
    Data(String),

    #[error("numerical: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefixes the message with where it happened.
    pub(crate) fn context(self, what: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{what}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
            io => io,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::UnsupportedMethod(_) => CliError::Usage(msg),
            CoreError::InvalidInput(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::SingleClass
            | CoreError::TrivialClassifier(_) => CliError::Data(msg),
            CoreError::NoSignChange { .. }
            | CoreError::NoFlipFound
            | CoreError::AttackFailed { .. }
            | CoreError::NotConverged(_) => CliError::Numerical(msg),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
