use std::fmt;

/// Failure classes of the command-line tool, mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input (exit code 2).
    Input(String),
    /// A computation failed or did not converge (exit code 1).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<fermicorr::Error> for CliError {
    fn from(e: fermicorr::Error) -> Self {
        use fermicorr::Error::*;
        match e {
            NotConverged { .. } | Numerical(_) => CliError::Numerical(e.to_string()),
            Domain(_) | Parse { .. } | Refused(_) | Io(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
