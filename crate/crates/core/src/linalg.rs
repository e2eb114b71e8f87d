//! Dense linear algebra over `R^n` and `C^n` with a fixed inner-product
//! convention: linear in the first argument, conjugate-linear in the second.
//!
//! Scalars are stored as explicit (re, im) pairs for both fields; a real
//! vector is one whose imaginary parts are all exactly zero and whose field
//! tag says so. Mixed-field operations are rejected at runtime.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Ground field tag. Every vector, subspace and norm carries exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Real => write!(f, "R"),
            ScalarField::Complex => write!(f, "C"),
        }
    }
}

/// Dense vector over the tagged field.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    field: ScalarField,
    coords: Vec<Complex64>,
}

impl Vector {
    /// Real vector from f64 coordinates. Rejects non-finite entries.
    pub fn real(coords: &[f64]) -> Result<Self> {
        for (i, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Vector {
            field: ScalarField::Real,
            coords: coords.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    /// Complex vector from (re, im) pairs. Rejects non-finite entries.
    pub fn complex(coords: &[(f64, f64)]) -> Result<Self> {
        for (i, &(re, im)) in coords.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Vector {
            field: ScalarField::Complex,
            coords: coords
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        })
    }

    pub(crate) fn from_parts(field: ScalarField, coords: Vec<Complex64>) -> Self {
        debug_assert!(
            field == ScalarField::Complex || coords.iter().all(|z| z.im == 0.0),
            "real vector with nonzero imaginary part"
        );
        Vector { field, coords }
    }

    pub fn zero(field: ScalarField, dim: usize) -> Self {
        Vector {
            field,
            coords: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// The i-th standard basis vector of the n-dimensional space.
    pub fn standard_basis(field: ScalarField, dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        let mut v = Vector::zero(field, dim);
        v.coords[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> Complex64 {
        self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn compat(&self, other: &Vector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// `<self, other>`: linear in `self`, conjugate-linear in `other`.
    pub fn inner(&self, other: &Vector) -> Result<Complex64> {
        self.compat(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Vector) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.coords.iter().zip(other.coords.iter()) {
            acc += a * b.conj();
        }
        acc
    }

    /// Euclidean length `sqrt(<v,v>)`.
    pub fn norm2(&self) -> f64 {
        self.coords
            .iter()
            .map(|z| z.re * z.re + z.im * z.im)
            .sum::<f64>()
            .sqrt()
    }

    /// Unit vector collinear with `self`. Errors on the zero vector.
    pub fn normalize(&self) -> Result<Vector> {
        let n = self.norm2();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale_real(1.0 / n))
    }

    pub fn scale_real(&self, t: f64) -> Vector {
        Vector {
            field: self.field,
            coords: self.coords.iter().map(|z| z * t).collect(),
        }
    }

    /// Multiply by a complex scalar. Only meaningful for complex vectors;
    /// real vectors accept real scalars through [`Vector::scale_real`].
    pub fn scale(&self, z: Complex64) -> Vector {
        debug_assert!(
            self.field == ScalarField::Complex || z.im == 0.0,
            "complex scalar applied to a real vector"
        );
        Vector {
            field: self.field,
            coords: self.coords.iter().map(|c| c * z).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.compat(other)?;
        Ok(Vector {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.compat(other)?;
        Ok(Vector {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `self - z * other`, used by the orthogonalization loops.
    pub(crate) fn sub_scaled(&self, z: Complex64, other: &Vector) -> Vector {
        Vector {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a - z * b)
                .collect(),
        }
    }

    /// Lexicographic comparison by (re, im) coordinate pairs; total order on
    /// finite vectors, used only for deterministic tie-breaking.
    pub(crate) fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for (a, b) in self.coords.iter().zip(other.coords.iter()) {
            match a.re.partial_cmp(&b.re).expect("finite coordinate") {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
            match a.im.partial_cmp(&b.im).expect("finite coordinate") {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }

    /// The unit scalar that makes the largest-modulus coordinate real and
    /// positive (first such coordinate on ties). Zero vectors map to 1.
    pub fn canonical_phase(&self) -> Complex64 {
        let mut best = 0usize;
        let mut best_mod = -1.0f64;
        for (i, z) in self.coords.iter().enumerate() {
            let m = z.norm();
            if m > best_mod {
                best_mod = m;
                best = i;
            }
        }
        let z = self.coords[best];
        let m = z.norm();
        if m == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        match self.field {
            ScalarField::Real => Complex64::new(if z.re < 0.0 { -1.0 } else { 1.0 }, 0.0),
            ScalarField::Complex => z.conj() / m,
        }
    }

    /// Phase-normalized representative of the line through `self`.
    pub fn canonicalized(&self) -> Vector {
        self.scale(self.canonical_phase())
    }
}

/// A subspace given by an orthonormal basis. An empty basis is the trivial
/// subspace, a full-length one the whole space.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: ScalarField,
    ambient_dim: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn trivial(field: ScalarField, ambient_dim: usize) -> Self {
        Subspace {
            field,
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(field: ScalarField, ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| Vector::standard_basis(field, ambient_dim, i))
            .collect();
        Subspace {
            field,
            ambient_dim,
            basis,
        }
    }

    /// Wrap vectors that are already orthonormal; validated to [`tol::ORTHO`].
    pub fn from_orthonormal(
        field: ScalarField,
        ambient_dim: usize,
        basis: Vec<Vector>,
    ) -> Result<Self> {
        for v in &basis {
            if v.field() != field {
                return Err(Error::FieldMismatch(field, v.field()));
            }
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: v.dim(),
                });
            }
        }
        for i in 0..basis.len() {
            for j in 0..=i {
                let g = basis[i].inner_unchecked(&basis[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                if (g - expect).norm() > tol::ORTHO {
                    return Err(Error::param("basis", "vectors are not orthonormal"));
                }
            }
        }
        Ok(Subspace {
            field,
            ambient_dim,
            basis,
        })
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Coordinates of `v` in this basis: `x_j = <v, q_j>`.
    pub fn coords_of(&self, v: &Vector) -> Vec<Complex64> {
        self.basis.iter().map(|q| v.inner_unchecked(q)).collect()
    }

    /// The ambient vector `sum_j x_j q_j`.
    pub fn from_coords(&self, x: &[Complex64]) -> Vector {
        assert_eq!(x.len(), self.basis.len(), "coordinate arity");
        let mut out = Vector::zero(self.field, self.ambient_dim);
        for (c, q) in x.iter().zip(self.basis.iter()) {
            for (o, b) in out.coords.iter_mut().zip(q.coords.iter()) {
                *o += c * b;
            }
        }
        out
    }
}

/// `<u, v>` with the crate convention (conjugate-linear in `v`).
pub fn inner(u: &Vector, v: &Vector) -> Result<Complex64> {
    u.inner(v)
}

/// Orthonormal basis of `span(vs)` by modified Gram-Schmidt with one
/// re-orthogonalization pass. Inputs are scaled to unit length first so the
/// rank-drop threshold [`tol::RANK_DROP`] acts on directions, not magnitudes.
pub fn gram_schmidt(vs: &[Vector]) -> Result<Subspace> {
    gram_schmidt_impl(vs, None)
}

fn gram_schmidt_impl(vs: &[Vector], ambient: Option<(ScalarField, usize)>) -> Result<Subspace> {
    let (field, dim) = match (vs.first(), ambient) {
        (_, Some(fd)) => fd,
        (Some(v), None) => (v.field(), v.dim()),
        (None, None) => {
            return Err(Error::param(
                "vectors",
                "empty input with unknown ambient space",
            ))
        }
    };
    let mut basis: Vec<Vector> = Vec::new();
    for v in vs {
        if v.field() != field {
            return Err(Error::FieldMismatch(field, v.field()));
        }
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        if basis.len() == dim {
            break;
        }
        let n = v.norm2();
        if n == 0.0 {
            continue;
        }
        let mut w = v.scale_real(1.0 / n);
        for _ in 0..2 {
            for q in &basis {
                let c = w.inner_unchecked(q);
                w = w.sub_scaled(c, q);
            }
        }
        let r = w.norm2();
        if r > tol::RANK_DROP {
            basis.push(w.scale_real(1.0 / r));
        }
    }
    Ok(Subspace {
        field,
        ambient_dim: dim,
        basis,
    })
}

/// Orthogonal complement, built by extending the subspace basis with the
/// standard basis and keeping the new directions.
pub fn orthogonal_complement(s: &Subspace) -> Subspace {
    let k = s.dim();
    let mut seed: Vec<Vector> = s.basis.to_vec();
    for i in 0..s.ambient_dim {
        seed.push(Vector::standard_basis(s.field, s.ambient_dim, i));
    }
    let full = gram_schmidt_impl(&seed, Some((s.field, s.ambient_dim)))
        .expect("same field and dimension by construction");
    debug_assert_eq!(full.dim(), s.ambient_dim);
    Subspace {
        field: s.field,
        ambient_dim: s.ambient_dim,
        basis: full.basis[k..].to_vec(),
    }
}

/// Orthogonal projection of `v` onto `s`: `sum_j <v,q_j> q_j`.
pub fn project(v: &Vector, s: &Subspace) -> Result<Vector> {
    if v.field() != s.field {
        return Err(Error::FieldMismatch(v.field(), s.field));
    }
    if v.dim() != s.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: s.ambient_dim,
            got: v.dim(),
        });
    }
    let mut out = Vector::zero(s.field, s.ambient_dim);
    for q in &s.basis {
        let c = v.inner_unchecked(q);
        for (o, b) in out.coords.iter_mut().zip(q.coords.iter()) {
            *o += c * b;
        }
    }
    Ok(out)
}
