//! Finitely generated norms `f(v) = max_{u in U} |<v,u>|` over a finite
//! support set `U`, their seminorm diagnosis, and restriction to subspaces.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ScalarField, Subspace, Vector};

/// A finitely generated norm (possibly a seminorm when the support does not
/// span the space; see [`NormSpec::is_norm`]).
#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec {
    field: ScalarField,
    dim: usize,
    support: Vec<Vector>,
}

/// Result of the norm-vs-seminorm classification.
#[derive(Clone, Debug)]
pub struct NormCheck {
    pub is_norm: bool,
    /// Orthonormal basis of `U^perp`; empty exactly when `is_norm`.
    pub kernel: Vec<Vector>,
}

impl NormSpec {
    /// Build a norm spec. The support must be nonempty, of matching field and
    /// dimension, with every vector nonzero and finite.
    pub fn new(field: ScalarField, dim: usize, support: Vec<Vector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be at least 1"));
        }
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        for u in &support {
            if u.field() != field {
                return Err(Error::FieldMismatch(field, u.field()));
            }
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.dim(),
                });
            }
            if u.is_zero() {
                return Err(Error::ZeroVector);
            }
        }
        Ok(NormSpec {
            field,
            dim,
            support,
        })
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[Vector] {
        &self.support
    }

    fn check_vector(&self, v: &Vector) -> Result<()> {
        if v.field() != self.field {
            return Err(Error::FieldMismatch(self.field, v.field()));
        }
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// `f(v) = max_u |<v,u>|`.
    pub fn evaluate(&self, v: &Vector) -> Result<f64> {
        self.check_vector(v)?;
        Ok(self.eval_unchecked(v))
    }

    pub(crate) fn eval_unchecked(&self, v: &Vector) -> f64 {
        self.eval_with_index(v).1
    }

    /// Maximizing support index and value, lowest index on ties. This is the
    /// single arithmetic path shared by `evaluate` and `dual_witness`.
    pub(crate) fn eval_with_index(&self, v: &Vector) -> (usize, f64) {
        let mut best = 0usize;
        let mut best_val = -1.0f64;
        for (i, u) in self.support.iter().enumerate() {
            let m = v.inner_unchecked(u).norm();
            if m > best_val {
                best_val = m;
                best = i;
            }
        }
        (best, best_val)
    }

    /// The support vector attaining `f(v)`, lowest index on ties.
    pub fn dual_witness(&self, v: &Vector) -> Result<&Vector> {
        self.check_vector(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let (i, _) = self.eval_with_index(v);
        Ok(&self.support[i])
    }

    /// Norm iff `span(U)` has full rank; otherwise returns a basis of the
    /// kernel `U^perp` as the diagnostic.
    pub fn is_norm(&self) -> NormCheck {
        let span = linalg::gram_schmidt(&self.support).expect("support is validated");
        if span.dim() == self.dim {
            NormCheck {
                is_norm: true,
                kernel: Vec::new(),
            }
        } else {
            let kernel = linalg::orthogonal_complement(&span);
            NormCheck {
                is_norm: false,
                kernel: kernel.basis().to_vec(),
            }
        }
    }

    /// Pairs of support indices that are duplicates up to phase: same
    /// direction (residual below 1e-10) and same length (relative 1e-10).
    /// Flagged, never removed.
    pub fn lint_support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let units: Vec<Vector> = self
            .support
            .iter()
            .map(|u| u.normalize().expect("support vectors are nonzero"))
            .collect();
        for i in 0..units.len() {
            for j in i + 1..units.len() {
                let g = units[i].inner_unchecked(&units[j]);
                let m = g.norm();
                if m == 0.0 {
                    continue;
                }
                let aligned = units[j].scale(g / m);
                let angular = units[i].sub(&aligned).expect("same space").norm2();
                let li = self.support[i].norm2();
                let lj = self.support[j].norm2();
                if angular < 1e-10 && (li / lj - 1.0).abs() < 1e-10 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Restriction `f | s` represented through the projected support.
    pub fn restrict(&self, s: &Subspace) -> Result<RestrictedNorm> {
        if s.field() != self.field {
            return Err(Error::FieldMismatch(self.field, s.field()));
        }
        if s.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: s.ambient_dim(),
            });
        }
        if s.is_trivial() {
            return Err(Error::TrivialSubspace);
        }
        let projected_support = self
            .support
            .iter()
            .map(|u| linalg::project(u, s).expect("validated above"))
            .collect();
        Ok(RestrictedNorm {
            parent: self.clone(),
            subspace: s.clone(),
            projected_support,
        })
    }

    /// The quotient norm on `span(U)` for a seminorm: the same evaluation map
    /// in coordinates of the support span, where it is a genuine norm.
    /// Returns the coordinate norm plus the span it lives on.
    pub fn quotient(&self) -> Result<(NormSpec, Subspace)> {
        let span = linalg::gram_schmidt(&self.support).expect("support is validated");
        if span.is_trivial() {
            return Err(Error::VanishingOnSubspace);
        }
        let support = self
            .support
            .iter()
            .map(|u| Vector::from_parts(self.field, span.coords_of(u)))
            .collect();
        let spec = NormSpec::new(self.field, span.dim(), support)?;
        Ok((spec, span))
    }
}

/// A norm restricted to a subspace, carrying the projections of the parent
/// support. For `v` in the subspace the parent value and the value through
/// the projected support agree (projection identity).
#[derive(Clone, Debug)]
pub struct RestrictedNorm {
    parent: NormSpec,
    subspace: Subspace,
    projected_support: Vec<Vector>,
}

impl RestrictedNorm {
    pub fn parent(&self) -> &NormSpec {
        &self.parent
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn projected_support(&self) -> &[Vector] {
        &self.projected_support
    }

    /// Evaluate through the projected support (ambient coordinates).
    pub fn evaluate(&self, v: &Vector) -> Result<f64> {
        self.parent.check_vector(v)?;
        Ok(self
            .projected_support
            .iter()
            .map(|u| v.inner_unchecked(u).norm())
            .fold(0.0, f64::max))
    }

    /// The restriction as a plain `NormSpec` in subspace coordinates. Zero
    /// projections are dropped (they never attain the max); errors when all
    /// projections vanish, i.e. the parent is degenerate on this subspace.
    pub fn to_norm_spec(&self) -> Result<NormSpec> {
        let scale: f64 = self
            .projected_support
            .iter()
            .map(Vector::norm2)
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::VanishingOnSubspace);
        }
        let support: Vec<Vector> = self
            .projected_support
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| Vector::from_parts(self.parent.field, self.subspace.coords_of(p)))
            .collect();
        NormSpec::new(self.parent.field, self.subspace.dim(), support)
    }
}

/// Convenience: the l-infinity style support `{e_1, ..., e_n}` whose norm is
/// the coordinate max. Used all over the tests.
pub fn coordinate_support(field: ScalarField, dim: usize) -> NormSpec {
    let support = (0..dim)
        .map(|i| Vector::standard_basis(field, dim, i))
        .collect();
    NormSpec::new(field, dim, support).expect("valid by construction")
}
