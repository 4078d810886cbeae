use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("square-root branch is ambiguous: |w| = {0:e} is below the noise floor")]
    BranchAmbiguity(f64),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("path crosses the branch cut near z = {0}")]
    CutCrossing(Complex64),

    #[error("Stokes-line corrector diverged near z = {0}")]
    CorrectorDivergence(Complex64),

    #[error("singularity encountered at z = {0}")]
    Singularity(Complex64),

    #[error("mode {n} collided with a neighbouring root at eps = {eps}")]
    RootCollision { n: usize, eps: Complex64 },

    #[error("integrator step size underflow at z = {0}")]
    StepUnderflow(Complex64),

    #[error("no sign change: {0}")]
    NoSignChange(String),

    #[error("eigenvalue {0} already recorded")]
    Duplicate(Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
