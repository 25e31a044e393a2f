use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (zero inverse,
    /// zero direction, singular matrix, out-of-range parameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense table would exceed the configured size cap.
    #[error("resource error: table of {requested} entries exceeds the cap of {cap}")]
    Resource { requested: u128, cap: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A spectral value landed too far from an integer to be rounded safely.
    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
