use thiserror::Error;

/// Errors raised by the numerical kernels and the outage estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or quadrature did not reach its tolerance. `partial` is the
    /// best available estimate, `previous` the one before it (if any).
    #[error("accuracy error in {what}: estimate {partial:e} not converged after {iterations} iterations{}", previous.map(|p| format!(" (previous {p:e})")).unwrap_or_default())]
    Accuracy {
        what: &'static str,
        partial: f64,
        previous: Option<f64>,
        iterations: usize,
    },

    #[error("degenerate correlation: r = 1 makes all {ports} ports identical")]
    DegenerateCorrelation { ports: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("at grid position {index} (value {value}): {source}")]
    AtGridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
