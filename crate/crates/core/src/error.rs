use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("fields live on different meshes")]
    MeshMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular 2x2 pivot block at block row {row} (|det| = {det:e})")]
    SingularPivot { row: usize, det: f64 },

    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("non-finite value detected in {0}")]
    NanDetected(&'static str),

    #[error("degenerate jacobian at node {node}: local spacing {spacing:e}")]
    DegenerateJacobian { node: usize, spacing: f64 },

    #[error("degenerate density: minimum {min:e} is not positive")]
    DegenerateDensity { min: f64 },

    #[error("tangled mesh: node ordering lost at node {node}")]
    TangledMesh { node: usize },

    #[error("gradient stencil does not fit inside the mesh around x = {x_c}")]
    StencilOutOfBounds { x_c: f64 },

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SingularPivot { .. }
            | Error::NoConvergence { .. }
            | Error::NanDetected(_)
            | Error::DegenerateJacobian { .. }
            | Error::DegenerateDensity { .. }
            | Error::TangledMesh { .. } => true,
            Error::AtStep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
