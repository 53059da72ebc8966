use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    Regularity {
        vertex: usize,
        degree: usize,
        expected: usize,
    },

    #[error("graph is not simple at vertex {vertex}: {message}")]
    NotSimple { vertex: usize, message: String },

    #[error("infeasible generator spec: {0}")]
    Spec(String),

    #[error("graph generation failed after {restarts} restarts")]
    Generation { restarts: usize },

    #[error("{name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("enumeration too large: {0}")]
    Scale(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("record file {path} is incomplete: {reason}")]
    Incomplete { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
