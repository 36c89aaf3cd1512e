use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the prediction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("density is undefined for graphs with fewer than 2 nodes")]
    UndefinedDensity,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate RMAT parameters: only {produced} distinct edges of {target} after {attempts} draws")]
    DegenerateParams {
        produced: usize,
        target: usize,
        attempts: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular system in linear solve")]
    SingularMatrix,

    #[error("SVR fit did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    FitFailure { iterations: usize, violation: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("MAPE is undefined when a true value is zero")]
    MapeUndefined,

    #[error("line {line}: unknown model kind `{name}`")]
    UnknownModel { line: usize, name: String },

    #[error("line {line}: unknown representation `{name}`")]
    UnknownRepresentation { line: usize, name: String },

    #[error("line {line}: invalid epoch time `{value}`")]
    InvalidTime { line: usize, value: String },

    #[error("line {line}: duplicate timing for ({graph_id}, {model}, {repr})")]
    DuplicateKey {
        line: usize,
        graph_id: String,
        model: String,
        repr: String,
    },

    #[error("graph `{graph_id}` is missing a {model} timing for one representation")]
    IncompletePair { graph_id: String, model: String },

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("unsupported artifact version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
