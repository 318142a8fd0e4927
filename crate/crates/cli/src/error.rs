use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", .path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("{}: {source}", .path.display())]
    Data {
        path: PathBuf,
        source: embias::Error,
    },

    #[error(transparent)]
    Analysis(#[from] embias::Error),

    #[error("{}:{line}: {message}", .path.display())]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error("cannot write {}: {source}", .path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 for bad input or data, 2 for failures of the tool itself.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Data { source, .. } | CliError::Analysis(source) if source.is_internal() => 2,
            CliError::Write { .. } | CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) trait DataContext<T> {
    fn in_file(self, path: &std::path::Path) -> Result<T>;
}

impl<T> DataContext<T> for std::result::Result<T, embias::Error> {
    fn in_file(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| CliError::Data {
            path: path.to_path_buf(),
            source,
        })
    }
}
