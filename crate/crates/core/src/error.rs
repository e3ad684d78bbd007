use crate::eig::EigResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Arguments outside an operation's domain (bad mode index, mismatched bases, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The request is valid but too large for the chosen path.
    #[error("refused: {0}")]
    Refused(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (energy {:.12}, residual {:.3e})",
        best.energy,
        best.residual_norm
    )]
    NotConverged {
        iterations: usize,
        best: Box<EigResult>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
