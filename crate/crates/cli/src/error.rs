use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Command failure, grouped by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unknown family, basis mismatch: exit 2.
    Contract(String),
    /// Unreadable, unwritable or malformed files: exit 3.
    Io(String),
    /// Zero or complex evidence and similar: exit 4.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Contract(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }

    /// Problems found while decoding a file count as file errors.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Contract(m) | CliError::Numerical(m) | CliError::Io(m) => {
                CliError::Io(format!("{}: {m}", path.display()))
            }
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Contract(m) | CliError::Io(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<spectral_bayes::Error> for CliError {
    fn from(e: spectral_bayes::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Contract(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
