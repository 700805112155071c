use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid density: {0}")]
    InvalidDensity(&'static str),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(&'static str),
    #[error("grid step {h} exceeds the limit {limit} (sigma/8)")]
    GridTooCoarse { h: f64, limit: f64 },
    #[error("grid [{lo}, {hi}] does not cover the required range [{need_lo}, {need_hi}]")]
    InsufficientCoverage {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },
    #[error("grids are not compatible")]
    GridMismatch,
    #[error("variance must be positive")]
    DegenerateVariance,
    #[error("density is not smooth enough for Fisher information: {0}")]
    NonsmoothDensity(&'static str),
    #[error("|Im t| * support radius exceeds the overflow guard; use the log-scale path")]
    UseLogScale,
    #[error("saddle-point solver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("quadrature refinement disagreement {relative:e} exceeds tolerance")]
    QuadratureError { relative: f64 },
    #[error("inverted density carries {boundary_mass:e} at the window boundary")]
    AliasingDetected { boundary_mass: f64 },
    #[error("numerical error: {0}")]
    NumericalError(&'static str),
    #[error("argument outside the domain: {0}")]
    DomainError(&'static str),
    #[error("construction failed: {0}")]
    ConstructionError(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
