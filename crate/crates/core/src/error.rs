use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input bytes are not valid UTF-8.
    #[error("invalid UTF-8 at byte offset {offset}")]
    Decode { offset: usize },

    /// A dictionary, mapping or weights file has a malformed line.
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },

    /// The loaded lexicon or mapping violates one of its constraints.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A file was readable but its content disagrees with its header or with
    /// the requested configuration.
    #[error("format error: {0}")]
    Format(String),

    #[error("training failed at epoch {epoch}: {message}")]
    Training { epoch: usize, message: String },

    /// Gold and system candidate sequences do not line up.
    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}
