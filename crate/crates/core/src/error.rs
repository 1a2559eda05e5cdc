use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("operation requires a symmetric grid with a node at x = 0")]
    AsymmetricGrid,
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("non-finite value at node {index} (x = {x})")]
    NonFinite { index: usize, x: f64 },
    #[error("parity contract violated: {what} has defect {defect:e} > {tol:e}")]
    Parity { what: String, defect: f64, tol: f64 },
    #[error("solver did not converge after {iterations} iterations (residual {residual:e}); history {history:?}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("CFL violated: dt = {dt} > {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("state became non-finite at t = {t}")]
    Blowup { t: f64 },
    #[error("state left the orbital tube at t = {t} (distance {distance:e})")]
    TubeExit { t: f64, distance: f64 },
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("{0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
