use std::path::PathBuf;

use crate::pgm::PgmError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Pgm { path: PathBuf, source: PgmError },

    #[error(transparent)]
    PgmData(#[from] PgmError),

    #[error("{}: invalid JSON: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("invalid file contents: {0}")]
    Format(String),

    #[error("manifest row {row}: {msg}")]
    Manifest { row: usize, msg: String },

    #[error("evaluation: {0}")]
    Eval(String),

    #[error(transparent)]
    Core(#[from] lbpx_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 1 usage, 2 I/O or format, 3 model/config mismatch.
    pub fn exit_code(&self) -> i32 {
        use lbpx_core::Error as C;
        match self {
            Error::Io { .. }
            | Error::Pgm { .. }
            | Error::PgmData(_)
            | Error::Json { .. }
            | Error::Format(_)
            | Error::Manifest { .. } => 2,
            Error::Eval(_) => 3,
            Error::Core(e) => match e {
                C::InvalidParameter(_) | C::OutOfBounds(_) => 1,
                C::InvalidImage { .. } | C::CorruptMap { .. } | C::Training(_) => 2,
                C::ImageTooSmall { .. } | C::ModelMismatch(_) => 3,
            },
        }
    }
}
