use thiserror::Error;

/// Errors raised by model validation, samplers and prediction.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerical degeneracy at block {block}: {what}")]
    Degenerate { block: usize, what: &'static str },
    #[error("invalid GIG parameters (lambda={lambda}, chi={chi}, psi={psi})")]
    InvalidGig { lambda: f64, chi: f64, psi: f64 },
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("too few draws: need at least {need}, got {got}")]
    TooFewDraws { need: usize, got: usize },
    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }
}
