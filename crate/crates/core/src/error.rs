use thiserror::Error;

/// Errors raised across the forward solver, the sampling indicators and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular kernel: points coincide")]
    CoincidentPoints,

    #[error("invalid incident wave: {0}")]
    InvalidIncident(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("finite-difference stencil needs at least 3 nodes per axis, got {0:?}")]
    Stencil(Vec<usize>),

    #[error("dense system is singular or ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("GMRES did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("measurement surfaces differ")]
    SurfaceMismatch,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
