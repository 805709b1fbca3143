//! Error type shared by all modules of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernel and the transformation layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operands have incompatible shapes for the requested operation.
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    Dimension {
        op: &'static str,
        expected: String,
        got: String,
    },

    /// An exactly singular matrix was hit during elimination.
    #[error("singular matrix: zero pivot at index {pivot}")]
    Singular { pivot: usize },

    /// S(x) is not invertible at a node where inversion is required.
    #[error("S(x) not invertible at x = {x} (condition estimate {cond:e})")]
    SingularNode { x: f64, cond: f64 },

    /// A coefficient was evaluated at a point of its exceptional set.
    #[error("coefficient not evaluable at x = {x}")]
    Evaluation { x: f64 },

    /// The system dialect does not support the requested operation.
    #[error("dialect error: {0}")]
    Dialect(String),

    /// The matrix identity drifted past tolerance during propagation.
    #[error("identity residual {residual:e} exceeds {tol:e} at x = {x}; refine the grid")]
    PropagationDrift { x: f64, residual: f64, tol: f64 },

    /// The parameter triple violates its defining matrix identity.
    #[error("triple identity violated: residual {residual:e} (relative {relative:e})")]
    TripleIdentity { residual: f64, relative: f64 },

    /// The spectral parameter is numerically indistinguishable from an
    /// eigenvalue of the generator matrix.
    #[error("lambda = {lambda} is numerically in the spectrum of the generator (condition {cond:e})")]
    ResolventSingular { lambda: Complex64, cond: f64 },

    /// A fractional-linear denominator is numerically singular.
    #[error("Moebius denominator singular: |det| = {det_abs:e} below {threshold:e}")]
    DenominatorSingular { det_abs: f64, threshold: f64 },

    /// The normalisation matrix E violates its commutation or unitarity
    /// requirements.
    #[error("normalisation error: {0}")]
    Normalization(String),

    /// An operation was requested at an index where it is undefined.
    #[error("index error: {0}")]
    Index(String),

    /// lambda = 0 has no square-root diagonalisation.
    #[error("degenerate spectral parameter lambda = 0")]
    DegenerateLambda,

    /// A quantity that must be (near-)real or (semi-)definite failed its check.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Inputs are inconsistent with each other (caller error).
    #[error("usage error: {0}")]
    Usage(String),

    /// An iterative kernel failed to converge.
    #[error("no convergence in {0}")]
    NoConvergence(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
