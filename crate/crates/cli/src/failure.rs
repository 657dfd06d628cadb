use std::path::PathBuf;

use thiserror::Error;

/// Every way a subcommand can fail, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: hyperwalk::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Data(String),

    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    /// 1 usage or configuration, 2 input data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core { source, .. } if source.is_config() => 1,
            CliError::Core { source, .. } if source.is_numeric() => 3,
            CliError::Numeric(_) => 3,
            CliError::Core { .. } | CliError::Io { .. } | CliError::Data(_) => 2,
        }
    }
}

/// Attaches the pipeline stage to library errors.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for hyperwalk::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { stage, source })
    }
}
