use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by curve evaluation, the scalar solvers and the market models.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or evaluation point lies outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The supplied interval does not bracket a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An iterative method ran out of iterations. `last` is the final iterate.
    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    Convergence { iterations: usize, last: f64 },

    /// A quantity that must be strictly signed for the model to be well posed is not.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// The requested market structure is only defined for linear curves.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// An equilibrium outcome failed one of its consistency checks.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Scenario configuration could not be validated.
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Unsupported(_) | Error::Config { .. } | Error::Io { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
