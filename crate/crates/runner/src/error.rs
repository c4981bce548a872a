use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The config file or an override did not parse or failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("record serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    /// A solver refused the inputs outright, before producing anything
    /// worth a verdict (for instance a bad domain spec).
    #[error(transparent)]
    Core(#[from] mems_core::Error),

    /// The shooting integrator ran off the end of its radius budget.
    #[error("shooting oracle failed: {0}")]
    Oracle(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
