use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("numerical: {0}")]
    Numerical(#[from] qmeas::Error),
    #[error("invariant check failed: {0}")]
    Check(String),
}

impl CliError {
    /// 2 for configuration and input problems, 3 for numerical invariant violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Numerical(_) | CliError::Check(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
