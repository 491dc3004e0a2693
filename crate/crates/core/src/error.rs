use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation.
    #[error("{field} must be {requirement}")]
    Validation {
        field: &'static str,
        requirement: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// Fixed-step integrator refused a step above its accuracy guard.
    #[error("step {step} exceeds accuracy guard {limit}")]
    StepTooLarge { step: f64, limit: f64 },

    /// A full-cycle quantity was requested on a grid where the emitter has
    /// not returned to the ground state.
    #[error("boundary terms not negligible: final population {population:e} >= cycle_tol {cycle_tol:e}")]
    BoundaryTerms { population: f64, cycle_tol: f64 },

    #[error("integration failure: norm drift {drift:e} exceeds {limit:e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("{msg} (line {line})")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
