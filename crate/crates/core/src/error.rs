use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the forecasting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported filter `{name}`; supported filters: {supported}")]
    UnsupportedFilter { name: String, supported: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series of length {len} is too short for {levels} levels with a {filter_len}-tap filter (maximum feasible levels: {max_levels})")]
    SeriesTooShort {
        len: usize,
        levels: usize,
        filter_len: usize,
        max_levels: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component {component}: {source}")]
    Component {
        component: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error("config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
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

    pub(crate) fn in_component(self, component: impl Into<String>) -> Self {
        Error::Component {
            component: component.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns the index of the first non-finite value, if any.
pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}
