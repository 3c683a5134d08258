use beliefshare_core::sim::{ConfigError, SimError, SweepError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sweep(SweepError),
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Sweep(e)
    }
}

impl CliError {
    /// 0 success, 1 usage or config error, 2 I/O error, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Config(ConfigError::Io { .. }) => 2,
            CliError::Sweep(SweepError::SweepTooLarge { .. }) => 3,
            _ => 1,
        }
    }
}
