use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

/// Anything that should abort a command with a message and exit code 2.
#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, io::Error),
    Parse(PathBuf, String),
    Core(rankprox_core::Error),
    Invalid(String),
}

impl CliError {
    pub fn io(path: &Path, err: io::Error) -> CliError {
        CliError::Io(path.to_path_buf(), err)
    }

    pub fn parse(path: &Path, what: impl Into<String>) -> CliError {
        CliError::Parse(path.to_path_buf(), what.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(path, err) => write!(f, "{}: {err}", path.display()),
            CliError::Parse(path, what) => write!(f, "{}: {what}", path.display()),
            CliError::Core(err) => write!(f, "{err}"),
            CliError::Invalid(what) => write!(f, "{what}"),
        }
    }
}

impl From<rankprox_core::Error> for CliError {
    fn from(err: rankprox_core::Error) -> CliError {
        CliError::Core(err)
    }
}
