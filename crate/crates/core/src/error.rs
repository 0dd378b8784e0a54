//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scenario or manifest violates one of its invariants.
    #[error("invalid configuration ({code}): {message}")]
    InvalidConfig { code: &'static str, message: String },

    /// A function was evaluated outside of its domain.
    #[error("domain error in {function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    /// An iterative evaluation did not reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    /// Adaptive quadrature could not meet the requested error bound.
    #[error("quadrature failed: estimate {estimate:e}, error bound {error:e} exceeds target {target:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        target: f64,
        evaluations: usize,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(code: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            code,
            message: message.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            function,
            message: message.into(),
        }
    }

    /// True for errors that originate in the numerical kernels.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Convergence { .. } | Error::Quadrature { .. }
        )
    }

    /// Short machine-readable tag, used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConfig { .. } => "invalid_config",
            Error::Domain { .. } => "domain",
            Error::Convergence { .. } => "convergence",
            Error::Quadrature { .. } => "quadrature",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
