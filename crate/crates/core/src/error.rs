//! Error type shared across the crate.

use crate::linalg::{ScalarField, Vector};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(ScalarField, ScalarField),

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("zero vector not allowed here")]
    ZeroVector,

    #[error("support set must be nonempty")]
    EmptySupport,

    #[error("trivial subspace not allowed here")]
    TrivialSubspace,

    /// The support set only spans a proper subspace, so `f` is a seminorm.
    /// Carries an orthonormal basis of the kernel `U^perp` as a diagnostic.
    #[error("support spans a proper subspace: f is a seminorm with kernel of dimension {}", kernel.len())]
    NotANorm { kernel: Vec<Vector> },

    #[error("norm vanishes on the requested subspace")]
    VanishingOnSubspace,

    #[error("sphere of real dimension {0} too large for the grid oracle (max 3)")]
    DimensionTooLarge(usize),

    /// Sphere optimization failed the two-start agreement test at the given
    /// greedy step. Carries the basis vectors found so far.
    #[error("sphere optimizer did not converge at step {step}")]
    NonConvergence { step: usize, partial: Vec<Vector> },

    #[error("basis values not in non-decreasing order")]
    UnorderedBasis,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
