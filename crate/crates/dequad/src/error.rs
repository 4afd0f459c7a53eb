//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A singularity collection came out empty.
    #[error("no singularities: neither the integrand nor the endpoint map contributes any")]
    EmptySet,

    /// Boundary image requested exactly at a slit mouth, where Im H diverges.
    #[error("pole: boundary image diverges at slit mouth x = {x}")]
    Pole { x: f64 },

    /// Slit preimages too spread out for log-scaled exponentials.
    #[error("overflow: slit preimage spread {spread} exceeds 300")]
    Overflow { spread: f64 },

    /// The nonlinear parameter solve failed to reach the residual target.
    #[error("solver did not converge: best residual {best_residual:e}")]
    Convergence { best_residual: f64 },

    /// The integrand returned NaN/Inf at an interior quadrature node.
    #[error("integrand evaluation failed at t = {t} (x = {x})")]
    Eval { t: f64, x: f64 },

    /// A problem description file could not be parsed.
    #[error("parse error{}: {msg}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Parse { field: Option<String>, msg: String },

    /// A problem description violated an invariant.
    #[error("invalid problem: {0}")]
    Validation(String),

    /// The adaptive reference integrator hit its subdivision limit.
    #[error("reference quadrature did not converge: estimate {estimate} with error bound {error_bound:e}")]
    NoConvergence { estimate: f64, error_bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
