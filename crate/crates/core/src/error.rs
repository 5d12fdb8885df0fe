use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("non-finite value of {what} at v = {at}")]
    Evaluation { what: &'static str, at: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("blow-up at t = {t}: node {node} reached {value:e}")]
    BlowUp { t: f64, node: usize, value: f64 },

    #[error("left the perturbative regime: {0}")]
    Perturbative(String),
}

impl Error {
    /// Errors produced by a numerical method rather than by invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::BlowUp { .. } | Error::Perturbative(_) | Error::Evaluation { .. }
        )
    }
}
