use thiserror::Error;

use crate::elements::{ElementKind, FieldVariant};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for {len} points (indices are 1-based)")]
    InvalidIndex { index: usize, len: usize },

    #[error("a cross-product chain needs at least 3 indices, got {0}")]
    ChainTooShort(usize),

    #[error("non-finite coordinate in configuration")]
    NonFinite,

    #[error("configuration needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate configuration: all points coincide")]
    DegenerateConfiguration,

    #[error("{kind} needs {expected} vertices, got {found}")]
    SizeMismatch {
        kind: ElementKind,
        expected: usize,
        found: usize,
    },

    #[error("field variant {variant} is not defined for {kind}")]
    InvalidVariant {
        kind: ElementKind,
        variant: FieldVariant,
    },

    #[error("flow diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("configuration is not collinear")]
    NotCollinear,

    #[error("{0} requires a tetrahedron")]
    NotTetrahedron(&'static str),

    #[error("non-finite entry in Jacobian")]
    NonFiniteJacobian,

    #[error("eigenvalue iteration did not converge")]
    EigenSolver,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
