use thiserror::Error;

/// Errors produced by the algebra, state, integration and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Hilbert space dimension must be at least 1")]
    ZeroDimension,

    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape { rows: usize, cols: usize, expected: usize },

    #[error("matrix is not Hermitian: max |M - M^†| entry is {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("coordinate vector has length {got}, basis has {expected} elements")]
    CoordLength { got: usize, expected: usize },

    #[error("elements belong to different bases (n={left} vs n={right})")]
    BasisMismatch { left: usize, right: usize },

    #[error("trace is {trace}, expected 1 (tolerance {tol:e})")]
    Trace { trace: f64, tol: f64 },

    #[error("eigenvalue {eigenvalue:e} is below the positivity floor -{tol:e}")]
    Positivity { eigenvalue: f64, tol: f64 },

    #[error("operation requires n = {expected}, got n = {got}")]
    Dimension { expected: usize, got: usize },

    #[error("step size must be finite and nonzero, got {0}")]
    StepSize(f64),

    #[error("Gauss-Legendre stage iteration stalled at residual {residual:e} after {sweeps} sweeps (step {step})")]
    StageConvergence { step: usize, sweeps: usize, residual: f64 },

    #[error("shooting did not reach tolerance after {iterations} Newton iterations (best residual {best_residual:e})")]
    ShootingDivergence { iterations: usize, best_residual: f64 },

    #[error("K-iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("subinterval {index}: {source}")]
    AtSubinterval {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_subinterval(self, index: usize) -> Self {
        Error::AtSubinterval {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
