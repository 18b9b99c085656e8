use thiserror::Error;

/// Errors produced by the mskit library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file, with the offending location.
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    /// Caller supplied an argument outside its contract (even kernel width,
    /// mismatched dimensions, unknown region name, ...).
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The computation is impossible on this data (degenerate geometry,
    /// too few samples, diverging optimization, ...).
    #[error("{0}")]
    Compute(String),
}

impl Error {
    pub fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
