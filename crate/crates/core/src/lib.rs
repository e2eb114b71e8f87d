//! Extremal orthonormal bases for finitely generated norms.
//!
//! A finitely generated norm on `R^n` or `C^n` is given by a finite support
//! set `U` as `f(v) = max_{u in U} |<v,u>|`; its unit ball is the polytope
//! cut out by the constraints `|<v,u>| <= 1`. This crate computes f-minimal
//! and f-maximal orthonormal bases (greedy extremal directions over shrinking
//! orthogonal complements), measures the worst-case inverted triangle ratio
//! `sum_i |<v,b_i>| f(b_i) / f(v)` against the `2^n - 1` bound, and generates
//! the two sharp lower-bound families that approach that bound.
//!
//! Entry points:
//! - [`NormSpec`] / [`linalg::Vector`]: norms and vectors over either field.
//! - [`extremal::minimal_basis`] / [`extremal::maximal_basis`]: the greedy engine.
//! - [`verify::upper_ratio`]: certified ratio via unit-ball vertex enumeration.
//! - [`construct::build_min_construction`] / [`construct::build_max_construction`]:
//!   the sharp families with predicted witness ratios.

pub mod construct;
pub mod error;
pub mod extremal;
pub mod json;
pub mod linalg;
pub mod norm;
pub mod random;
mod solve;
pub mod sphere;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use extremal::{BasisKind, EquivalenceReport, ExtremalBasis};
pub use linalg::{ScalarField, Subspace, Vector};
pub use norm::{NormSpec, RestrictedNorm};
pub use sphere::{OptMethod, OptMode, SphereOptResult};
pub use verify::{PropertyReport, RatioMethod, RatioReport};
