use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("finite-difference step {step:e} too small: cancellation dominates (fine diff {fine:e} > coarse diff {coarse:e})")]
    StepTooSmall { step: f64, fine: f64, coarse: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("geodesic blew up at step {step}")]
    GeodesicBlowUp { step: usize },

    #[error("degenerate plane: Gram determinant {gram:e}")]
    DegeneratePlane { gram: f64 },

    #[error("degenerate parameterization: |f_z|^2 = {0:e}")]
    DegenerateJet(f64),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate face {face}: metric area {area:e}")]
    DegenerateFace { face: usize, area: f64 },

    #[error("mesh is not a graph over the x3 = 0 plane (face {face} folds over)")]
    NonGraph { face: usize },

    #[error("vertex {vertex} has zero mass")]
    ZeroMass { vertex: usize },

    #[error("line search failed {failures} consecutive times at iteration {iteration} (T = {value}, grad = {grad_norm:e})")]
    LineSearch {
        failures: usize,
        iteration: usize,
        value: f64,
        grad_norm: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
