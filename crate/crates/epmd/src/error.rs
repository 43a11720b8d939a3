use std::io;
use std::path::PathBuf;

use epmd_core::Error as CoreError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed spec file: {0}")]
    SpecParse(String),
    #[error("spec file does not describe an MDS code (first failing block set {0:?})")]
    NotMds(Vec<usize>),
    #[error("bad magic, not an EPMD codeword file")]
    BadMagic,
    #[error("unsupported codeword format version {0}")]
    UnsupportedVersion(u8),
    #[error("size mismatch: expected {expected} bytes, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("file header ({what}) does not match the code")]
    HeaderMismatch { what: &'static str },
    #[error("scenario infeasible: {0}")]
    ScenarioInfeasible(String),
    #[error("invalid argument: {0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 validation failure, 3 verification failure, 4 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 4,
            Error::NotMds(_) => 3,
            Error::Core(
                CoreError::RetriesExhausted { .. } | CoreError::SingularMatrix | CoreError::InconsistentInput,
            ) => 3,
            _ => 2,
        }
    }
}
