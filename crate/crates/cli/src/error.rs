use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Degenerate(ipsga_core::Error),
    #[error(transparent)]
    Core(ipsga_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, err: csv::Error) -> Self {
        let path = path.into();
        match err.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { path, source },
            other => CliError::Usage(format!("{}: malformed CSV: {other:?}", path.display())),
        }
    }

    /// 1 usage, 2 I/O, 3 degenerate selection.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Degenerate(_) => 3,
        }
    }
}

impl From<ipsga_core::Error> for CliError {
    fn from(e: ipsga_core::Error) -> Self {
        match e {
            ipsga_core::Error::DegenerateSelection { .. } => CliError::Degenerate(e),
            other => CliError::Core(other),
        }
    }
}
