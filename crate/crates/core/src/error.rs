use thiserror::Error;

use crate::engineering::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count must be at least {min}, got {got}")]
    TooFewModes { min: usize, got: usize },

    #[error("mode index {index} out of range for {n_modes} modes (indices are 1-based)")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("invalid mode pair ({0}, {1}): modes must differ")]
    InvalidModePair(usize, usize),

    #[error("empty mode subset")]
    EmptySubset,

    #[error("dimension mismatch: expected {expected} modes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid squeezing {0}: must be a finite positive number")]
    InvalidSqueezing(f64),

    #[error("invalid transmittivity {0}: must lie strictly inside (0, 1)")]
    InvalidTransmittivity(f64),

    #[error("matrix is not symplectic (residual {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("state is not pure (purity residual {residual:e} exceeds {tolerance:e})")]
    NotPure { residual: f64, tolerance: f64 },

    #[error(
        "state not recognised as q-p block-diagonal after local normalization \
         (residual {residual:e} exceeds {tolerance:e}); this test is heuristic and does not \
         prove the state is locally inequivalent to the standard form"
    )]
    NotInGenericClass { residual: f64, tolerance: f64 },

    #[error("invalid standard form: {0}")]
    InvalidStandardForm(String),

    #[error("diagonal reconstruction infeasible after {iterations} iterations: {reason} (last residual {residual:e})")]
    Infeasible {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("invalid recipe: {}", join_violations(.0))]
    InvalidRecipe(Vec<Violation>),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid spring coupling {0}: must be finite and non-negative")]
    InvalidCoupling(f64),

    #[error("invalid squeezing range: s_max = {0} must exceed 1")]
    InvalidSqueezingRange(f64),

    #[error("invalid mode range {min}..={max}")]
    InvalidRange { min: usize, max: usize },

    #[error("eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("format error: {0}")]
    Format(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
