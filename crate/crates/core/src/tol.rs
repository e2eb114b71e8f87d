//! Named tolerances used throughout the crate.
//!
//! Everything runs in f64 at desk scale (`n <= 8`, `|U| <= 64`), so these
//! are fixed constants rather than per-call knobs. The CLI exposes overrides
//! for the few decision-level tolerances (bound slack, equivalence).

/// Orthonormality of subspace bases: `|<q_i,q_j> - delta_ij|`.
pub const ORTHO: f64 = 1e-12;

/// Gram-Schmidt rank-drop threshold on the residual norm of a unit-scaled
/// input vector.
pub const RANK_DROP: f64 = 1e-10;

/// Orthonormality required of extremal bases and sphere-opt results.
pub const BASIS_ORTHO: f64 = 1e-10;

/// Agreement between a stored value and its re-evaluation.
pub const EVAL: f64 = 1e-12;

/// Two-start agreement threshold for declaring the sphere minimizer
/// converged (absolute below 1, relative above).
pub const CONVERGENCE: f64 = 1e-9;

/// Relative activity threshold for the active-set polish.
pub const ACTIVITY: f64 = 1e-7;

/// Additive slack when testing `ratio <= bound`.
pub const RATIO_SLACK: f64 = 1e-6;

/// Per-constraint feasibility slack in vertex enumeration.
pub const FEASIBILITY: f64 = 1e-9;

/// Per-vector distance under which two canonicalized basis vectors are
/// considered equal.
pub const EQUIVALENCE: f64 = 1e-8;

/// Unit-modulus slack for recovered phases.
pub const PHASE: f64 = 1e-10;

/// Multiplicative slack for the basis-equivalence ratio bounds.
pub const RATIO_MULT: f64 = 1e-9;

/// Below this modulus an inner product is treated as zero when computing
/// the inversion premise factor.
pub const INNER_ZERO: f64 = 1e-12;

/// Tolerance scaled for magnitude: absolute while `|scale| <= 1`, relative
/// beyond that.
#[inline]
pub fn scaled(tol: f64, scale: f64) -> f64 {
    tol * scale.abs().max(1.0)
}
