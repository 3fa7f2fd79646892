use thiserror::Error;

use crate::kernels::KernelFamily;

/// Errors raised by the kernels, linear algebra, solvers and the shooting oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RbfError {
    #[error("invalid kernel parameter: {0}")]
    InvalidKernel(String),

    #[error("{family} does not support {what}")]
    Capability { family: KernelFamily, what: String },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("matrix is singular to working precision (pivot {pivot:e} in column {column})")]
    SingularMatrix { pivot: f64, column: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error(
        "shooting bracket [{lo}, {hi}] has no sign change (g(lo) = {g_lo:e}, g(hi) = {g_hi:e})"
    )]
    Bracketing { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("integration diverged at eta = {eta} ({direction})")]
    Divergence { eta: f64, direction: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("no converged solve among {steps} shape-parameter values")]
    ScanFailure { steps: usize },
}

pub type Result<T, E = RbfError> = std::result::Result<T, E>;
