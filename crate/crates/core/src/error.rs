use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("generator count mismatch: {0} vs {1}")]
    Structure(usize, usize),
    #[error("not a unit: {0}")]
    NonUnit(String),
    #[error("invalid triangulation: {0}")]
    Triangulation(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("degenerate jacobian")]
    DegenerateJacobian,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("sidedness violation: relation {0} may not act on the {1} side")]
    Sidedness(String, String),
    #[error("certificate failed to verify: {0}")]
    Certificate(String),
    #[error("invalid link presentation: {0}")]
    Link(String),
    #[error("inconsistent turn sequence: {0}")]
    Turns(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
