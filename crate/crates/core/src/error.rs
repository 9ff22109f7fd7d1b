use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (partial value {partial:e}, error estimate {error_estimate:e})")]
    QuadratureNotConverged {
        partial: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("series truncated at {terms} terms before reaching the tail tolerance (partial sum {partial:e})")]
    SeriesTruncated { partial: f64, terms: usize },

    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("experiment: {0}")]
    Experiment(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
