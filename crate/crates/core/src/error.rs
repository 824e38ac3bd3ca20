use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("bandwidth {bandwidth} too small for n = {n} (need at least 2 frequencies)")]
    Bandwidth { n: usize, bandwidth: usize },

    #[error("zero periodogram ordinate at frequency index {index}")]
    ZeroPeriodogram { index: usize },

    #[error("autocovariance sequence not positive definite at lag {lag}")]
    NotPositiveDefinite { lag: usize },

    #[error("quadrature did not converge at lag {lag} (error estimate {error_estimate:e})")]
    Quadrature { lag: usize, error_estimate: f64 },

    #[error("singular weight system (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("weight assembly check failed: solver w_n = {solved}, closed form = {closed_form}")]
    ClosedFormMismatch { solved: f64, closed_form: f64 },

    #[error("sub-sample {index}: {source}")]
    Subsample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("ARMA fit failed: {0}")]
    ArmaFit(String),

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Whether the error is a configuration problem rather than a numerical one.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_) | Error::LengthMismatch { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
