use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] oofa_core::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

/// Failure classes, one per nonzero exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Validation,
    Computational,
    CapExceeded,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Computational => 4,
            ErrorKind::CapExceeded => 5,
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Validation => "validation",
            ErrorKind::Computational => "computational",
            ErrorKind::CapExceeded => "cap",
        })
    }
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn kind(&self) -> ErrorKind {
        use oofa_core::Error as C;
        match self {
            Error::Usage(_) => ErrorKind::Usage,
            Error::Core(C::CapExceeded { .. }) => ErrorKind::CapExceeded,
            Error::Core(
                C::Singular { .. }
                | C::RankDeficient { .. }
                | C::InsufficientDf { .. }
                | C::NonConvergence { .. }
                | C::SearchExhausted(_),
            ) => ErrorKind::Computational,
            _ => ErrorKind::Validation,
        }
    }

    /// `error: kind=<kind> msg=<message>` on a single line.
    pub fn machine_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error: kind={} msg={}", self.kind(), msg.trim())
    }
}
