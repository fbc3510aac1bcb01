use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A root that did not reach the residual threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct FailedRoot {
    pub index: usize,
    pub z: Complex64,
    pub residual: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("enumeration needs {states} states, above the cap of {cap}")]
    TooLarge { states: f64, cap: u64 },

    #[error("transfer matrix dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("unsupported lattice dimension d = {0}")]
    UnsupportedDimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error(
        "ill-conditioned coefficient recovery: imaginary/real ratio {ratio:e} above {threshold:e}"
    )]
    Conditioning { ratio: f64, threshold: f64 },

    #[error("root finder did not converge for {} of {total} roots", failed.len())]
    RootsNotConverged {
        total: usize,
        roots: Vec<Complex64>,
        failed: Vec<FailedRoot>,
    },

    #[error("seed residual {residual:e} above {threshold:e}")]
    SeedResidual { residual: f64, threshold: f64 },

    #[error("degenerate gradient |F'| = {magnitude:e} at {z} (suspected multiple point)")]
    DegenerateGradient { z: Complex64, magnitude: f64 },

    #[error("Newton iteration diverged: {0}")]
    Divergence(String),

    #[error("refinement converged to branch {got}, expected {expected}")]
    BasinMismatch { expected: i64, got: i64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
