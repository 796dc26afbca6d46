use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("continuity error: phase jump of {jump} rad between {from} and {to}")]
    Continuity { from: f64, to: f64, jump: f64 },
    #[error("zero {k} did not converge")]
    Convergence { k: usize },
    #[error("quadrature did not converge: {0}")]
    Accuracy(String),
    #[error("zero table too small: need k_max >= {required}, have {available}")]
    Coverage { required: usize, available: usize },
    #[error("index {k} outside zero table (k_max = {k_max})")]
    Index { k: usize, k_max: usize },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("phase reduction lost precision: tau = {tau:e}")]
    Precision { tau: f64 },
    #[error("envelope violated: {0}")]
    Envelope(String),
    #[error("no critical point: {0}")]
    NoCriticalPoint(String),
    #[error("cell lambda = {lambda}, T = {big_t}: {source}")]
    Cell { lambda: f64, big_t: f64, source: Box<Error> },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
