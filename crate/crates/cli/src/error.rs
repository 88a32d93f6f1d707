use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] tvp_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {msg}")]
    BadData { path: PathBuf, msg: String },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("serialization: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Self::Csv {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Model(_) => "model",
            Self::Io { .. } => "io",
            Self::Csv { .. } => "csv",
            Self::BadData { .. } => "bad_data",
            Self::UnknownColumn(_) => "unknown_column",
            Self::InvalidArgument(_) => "invalid_argument",
            Self::Config { .. } => "config",
            Self::Serialize(_) => "serialization",
        }
    }

    /// Machine-readable summary printed on failure.
    pub fn summary(&self) -> ErrorSummary {
        let mut causes = Vec::new();
        let mut src = std::error::Error::source(self);
        while let Some(e) = src {
            causes.push(e.to_string());
            src = e.source();
        }
        ErrorSummary {
            error: self.kind(),
            message: self.to_string(),
            causes,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorSummary {
    pub error: &'static str,
    pub message: String,
    pub causes: Vec<String>,
}
