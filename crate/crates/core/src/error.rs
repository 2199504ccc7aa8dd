use thiserror::Error;

/// Failure modes shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("matrix is not Hermitian (max |A - A^dagger| element = {deviation:.3e})")]
    HermiticityViolation { deviation: f64 },

    #[error("invalid state: {reason} (metric = {metric:.6e})")]
    InvalidState { reason: &'static str, metric: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("numerical routine failed: {context} (estimate = {estimate:.6e}, error = {error:.3e})")]
    NumericalFailure {
        context: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("integration failed at t = {t:.6e}: {reason} (metric = {metric:.6e})")]
    IntegrationFailure {
        t: f64,
        reason: &'static str,
        metric: f64,
    },

    #[error(
        "closed-form state leaves the physical state space at t = {t:.6e} \
         (min eigenvalue = {min_eigenvalue:.6e})"
    )]
    ModelInconsistency { t: f64, min_eigenvalue: f64 },

    #[error("no sign change for the crossover search on [{lo:.3e}, {hi:.3e}]")]
    NoCrossover { lo: f64, hi: f64 },

    #[error("coherence postulate `{postulate}` violated at sample {sample} (margin = {margin:.3e})")]
    PostulateViolation {
        postulate: &'static str,
        sample: usize,
        margin: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
