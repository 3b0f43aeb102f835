use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl CliError {
    /// 1 for configuration and output problems, 2 for numerical or
    /// invariant failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

impl From<foch::Error> for CliError {
    fn from(e: foch::Error) -> Self {
        CliError::Invariant(e.to_string())
    }
}
