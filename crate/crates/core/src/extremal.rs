//! The greedy construction of f-minimal and f-maximal orthonormal bases and
//! the basis-equivalence predicate.
//!
//! Step k optimizes f over the unit sphere of the orthogonal complement of
//! the span of the vectors chosen so far: analytically for the maximum,
//! through the multistart minimizer for the minimum. Ties are broken
//! deterministically (lowest support index for maximal steps, lexicographic
//! canonical argopt for minimal steps), which is harmless: the bounds hold
//! for any extremal choice.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ScalarField, Subspace, Vector};
use crate::norm::NormSpec;
use crate::sphere::{self, OptMethod, SphereOptResult};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Minimal,
    Maximal,
    /// Externally supplied basis wrapped for verification; no extremality is
    /// claimed.
    External,
}

impl BasisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisKind::Minimal => "minimal",
            BasisKind::Maximal => "maximal",
            BasisKind::External => "external",
        }
    }
}

/// Solver metadata for one greedy step.
#[derive(Clone, Debug)]
pub struct StepProvenance {
    pub method: OptMethod,
    pub starts_used: usize,
    pub converged: bool,
    pub seed: u64,
}

impl StepProvenance {
    fn from_result(r: &SphereOptResult) -> Self {
        StepProvenance {
            method: r.method,
            starts_used: r.starts_used,
            converged: r.converged,
            seed: r.seed,
        }
    }
}

/// An ordered orthonormal basis with the norm value of each vector.
#[derive(Clone, Debug)]
pub struct ExtremalBasis {
    kind: BasisKind,
    vectors: Vec<Vector>,
    values: Vec<f64>,
    provenance: Vec<StepProvenance>,
}

impl ExtremalBasis {
    /// Wrap vectors and values directly (JSON load path). Orthonormality is
    /// enforced to [`tol::BASIS_ORTHO`].
    pub fn from_parts(kind: BasisKind, vectors: Vec<Vector>, values: Vec<f64>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::param("basis", "must contain at least one vector"));
        }
        if vectors.len() != values.len() {
            return Err(Error::param("basis", "vectors and values differ in length"));
        }
        let field = vectors[0].field();
        let dim = vectors[0].dim();
        for v in &vectors {
            if v.field() != field {
                return Err(Error::FieldMismatch(field, v.field()));
            }
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        for i in 0..vectors.len() {
            for j in 0..=i {
                let g = vectors[i].inner(&vectors[j])?;
                let expect = if i == j { 1.0 } else { 0.0 };
                if (g - expect).norm() > tol::BASIS_ORTHO {
                    return Err(Error::param("basis", "vectors are not orthonormal"));
                }
            }
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(
                    "basis",
                    "values must be finite and nonnegative",
                ));
            }
        }
        Ok(ExtremalBasis {
            kind,
            vectors,
            values,
            provenance: Vec::new(),
        })
    }

    /// Wrap an externally supplied orthonormal family, evaluating `f` on it.
    pub fn external(f: &NormSpec, vectors: Vec<Vector>) -> Result<Self> {
        let values: Result<Vec<f64>> = vectors.iter().map(|v| f.evaluate(v)).collect();
        ExtremalBasis::from_parts(BasisKind::External, vectors, values?)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &[StepProvenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn field(&self) -> ScalarField {
        self.vectors[0].field()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// View with vectors stably re-ordered so values are non-decreasing (the
    /// arrangement the hereditary and equivalence checks assume).
    pub fn sorted_ascending(&self) -> ExtremalBasis {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[a]
                .partial_cmp(&self.values[b])
                .expect("finite values")
        });
        ExtremalBasis {
            kind: self.kind,
            vectors: order.iter().map(|&i| self.vectors[i].clone()).collect(),
            values: order.iter().map(|&i| self.values[i]).collect(),
            provenance: Vec::new(),
        }
    }

    pub fn is_sorted_ascending(&self) -> bool {
        self.values
            .windows(2)
            .all(|w| w[0] <= w[1] + tol::scaled(1e-12, w[1]))
    }
}

/// Outcome of the equivalence test: equivalent bases agree position-wise up
/// to unit scalars, recovered as `phases[i] = <e_i, b_i>` normalized.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub phases: Option<Vec<Complex64>>,
}

fn greedy(f: &NormSpec, kind: BasisKind, seed: u64) -> Result<ExtremalBasis> {
    let check = f.is_norm();
    if !check.is_norm {
        return Err(Error::NotANorm {
            kernel: check.kernel,
        });
    }
    let n = f.dim();
    let mut chosen: Vec<Vector> = Vec::new();
    let mut provenance = Vec::new();
    for step in 0..n {
        let span = Subspace::from_orthonormal(f.field(), n, chosen.clone())
            .expect("accumulated vectors stay orthonormal");
        let complement = linalg::orthogonal_complement(&span);
        let result = match kind {
            BasisKind::Maximal => sphere::max_on_sphere(f, &complement)?,
            BasisKind::Minimal => sphere::min_on_sphere_seeded(f, &complement, seed)?,
            BasisKind::External => unreachable!("greedy is never called for external bases"),
        };
        if !result.converged {
            return Err(Error::NonConvergence {
                step,
                partial: chosen,
            });
        }
        provenance.push(StepProvenance::from_result(&result));
        chosen.push(result.argopt);
    }
    let values: Result<Vec<f64>> = chosen.iter().map(|v| f.evaluate(v)).collect();
    Ok(ExtremalBasis {
        kind,
        vectors: chosen,
        values: values?,
        provenance,
    })
}

/// f-minimal basis: each step minimizes f on the sphere of the current
/// orthogonal complement. Requires a genuine norm.
pub fn minimal_basis(f: &NormSpec) -> Result<ExtremalBasis> {
    greedy(f, BasisKind::Minimal, sphere::DEFAULT_SEED)
}

/// f-minimal basis with an explicit multistart seed.
pub fn minimal_basis_seeded(f: &NormSpec, seed: u64) -> Result<ExtremalBasis> {
    greedy(f, BasisKind::Minimal, seed)
}

/// f-maximal basis via the analytic per-step maximum.
pub fn maximal_basis(f: &NormSpec) -> Result<ExtremalBasis> {
    greedy(f, BasisKind::Maximal, 0)
}

/// Multiply each vector by the unit scalar that makes its largest-modulus
/// coordinate real and positive. Idempotent; values are unchanged since the
/// norm is phase-invariant.
pub fn canonicalize(b: &ExtremalBasis) -> ExtremalBasis {
    ExtremalBasis {
        kind: b.kind,
        vectors: b.vectors.iter().map(Vector::canonicalized).collect(),
        values: b.values.clone(),
        provenance: b.provenance.clone(),
    }
}

/// Position-wise equivalence up to unit scalars: canonical representatives
/// must agree within [`tol::EQUIVALENCE`] per vector.
pub fn are_equivalent(b: &ExtremalBasis, e: &ExtremalBasis) -> EquivalenceReport {
    if b.len() != e.len() || b.field() != e.field() || b.dim() != e.dim() {
        return EquivalenceReport {
            equivalent: false,
            phases: None,
        };
    }
    let cb = canonicalize(b);
    let ce = canonicalize(e);
    for (x, y) in cb.vectors.iter().zip(ce.vectors.iter()) {
        let d = x.sub(y).expect("same space").norm2();
        if d > tol::EQUIVALENCE {
            return EquivalenceReport {
                equivalent: false,
                phases: None,
            };
        }
    }
    let phases = b
        .vectors
        .iter()
        .zip(e.vectors.iter())
        .map(|(bv, ev)| {
            let g = ev.inner_unchecked(bv);
            let m = g.norm();
            if m == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                g / m
            }
        })
        .collect();
    EquivalenceReport {
        equivalent: true,
        phases: Some(phases),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::coordinate_support;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(coords: &[f64]) -> Vector {
        Vector::real(coords).unwrap()
    }

    fn e(dim: usize, i: usize) -> Vector {
        Vector::standard_basis(ScalarField::Real, dim, i)
    }

    fn standard_basis_as(f: &NormSpec, kind: BasisKind) -> ExtremalBasis {
        let vectors = (0..f.dim()).map(|i| e(f.dim(), i)).collect();
        let mut b = ExtremalBasis::external(f, vectors).unwrap();
        b.kind = kind;
        b
    }

    #[test]
    fn minimal_basis_linf() {
        let f = coordinate_support(ScalarField::Real, 2);
        let b = minimal_basis(&f).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for v in b.values() {
            assert!((v - s).abs() < 1e-9);
        }
        // Both vectors live on the diagonals.
        for v in b.vectors() {
            let c0 = v.coord(0).re.abs();
            let c1 = v.coord(1).re.abs();
            assert!((c0 - s).abs() < 1e-9 && (c1 - s).abs() < 1e-9);
        }
        // Cross-check each step against the grid oracle.
        let full = Subspace::full(ScalarField::Real, 2);
        let oracle = sphere::grid_oracle(&f, &full, sphere::OptMode::Min, 100_000).unwrap();
        assert!((b.values()[0] - oracle.value).abs() < 1e-9);
    }

    #[test]
    fn minimal_basis_dimension_one() {
        let f = NormSpec::new(ScalarField::Real, 1, vec![r(&[0.7])]).unwrap();
        let b = minimal_basis(&f).unwrap();
        assert_eq!(b.vectors()[0], r(&[1.0]));
        assert!((b.values()[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn minimal_basis_of_min_construction() {
        let out = crate::construct::build_min_construction(2, 0.1).unwrap();
        let b = minimal_basis(&out.norm).unwrap();
        let report = are_equivalent(&b, &out.expected_basis);
        assert!(report.equivalent);
        for p in report.phases.unwrap() {
            assert!((p.norm() - 1.0).abs() < tol::PHASE);
        }
    }

    #[test]
    fn maximal_basis_linf() {
        let f = coordinate_support(ScalarField::Real, 2);
        let b = maximal_basis(&f).unwrap();
        assert!(b.vectors()[0].sub(&e(2, 0)).unwrap().norm2() < 1e-12);
        assert!(b.vectors()[1].sub(&e(2, 1)).unwrap().norm2() < 1e-12);
        assert_eq!(b.values(), &[1.0, 1.0]);
    }

    #[test]
    fn maximal_basis_scaled_supports() {
        let f = NormSpec::new(ScalarField::Real, 2, vec![r(&[2.0, 0.0]), r(&[0.0, 1.0])]).unwrap();
        let b = maximal_basis(&f).unwrap();
        assert!(b.vectors()[0].sub(&e(2, 0)).unwrap().norm2() < 1e-12);
        assert!((b.values()[0] - 2.0).abs() < 1e-15);
        assert!((b.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximal_basis_of_max_construction() {
        let c = 0.9f64;
        let alpha = 2.0 * std::f64::consts::PI / 3.0;
        let out = crate::construct::build_max_construction(3, c, alpha).unwrap();
        let b = maximal_basis(&out.norm).unwrap();
        assert!(are_equivalent(&b, &out.expected_basis).equivalent);
        for (i, v) in b.values().iter().enumerate() {
            let expect = (c * alpha.sin()).powi(i as i32);
            assert!((v - expect).abs() < 1e-12, "value {i}: {v} vs {expect}");
        }
    }

    #[test]
    fn minimal_values_non_decreasing_maximal_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let f = crate::random::random_norm(ScalarField::Real, 3, 8, &mut rng).unwrap();
            let bmin = minimal_basis(&f).unwrap();
            assert!(bmin.values().windows(2).all(|w| w[0] <= w[1] + 1e-9));
            let bmax = maximal_basis(&f).unwrap();
            assert!(bmax.values().windows(2).all(|w| w[0] >= w[1] - 1e-9));
        }
    }

    #[test]
    fn canonicalize_examples() {
        let f = coordinate_support(ScalarField::Real, 2);
        let flipped = ExtremalBasis::external(&f, vec![r(&[-1.0, 0.0]), r(&[0.0, 1.0])]).unwrap();
        let canon = canonicalize(&flipped);
        assert_eq!(canon.vectors()[0], r(&[1.0, 0.0]));

        let fc = coordinate_support(ScalarField::Complex, 1);
        let b =
            ExtremalBasis::external(&fc, vec![Vector::complex(&[(0.0, 1.0)]).unwrap()]).unwrap();
        let canon = canonicalize(&b);
        assert!((canon.vectors()[0].coord(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonicalize_is_idempotent_on_random_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for case in 0..100 {
            let field = if case % 2 == 0 {
                ScalarField::Real
            } else {
                ScalarField::Complex
            };
            let dim = rng.gen_range(1..=4);
            let f = crate::random::random_norm(field, dim, dim + 2, &mut rng).unwrap();
            let vs: Vec<Vector> = (0..dim + 1)
                .map(|_| crate::random::random_vector(field, dim, &mut rng))
                .collect();
            let span = linalg::gram_schmidt(&vs).unwrap();
            if span.dim() < dim {
                continue;
            }
            let b = ExtremalBasis::external(&f, span.basis().to_vec()).unwrap();
            let once = canonicalize(&b);
            let twice = canonicalize(&once);
            for (x, y) in once.vectors().iter().zip(twice.vectors().iter()) {
                assert!(x.sub(y).unwrap().norm2() < 1e-14);
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let f = coordinate_support(ScalarField::Real, 2);
        let b = standard_basis_as(&f, BasisKind::External);
        let flipped = ExtremalBasis::external(&f, vec![r(&[-1.0, 0.0]), r(&[0.0, -1.0])]).unwrap();
        let rep = are_equivalent(&b, &flipped);
        assert!(rep.equivalent);
        for p in rep.phases.unwrap() {
            assert!((p + Complex64::new(1.0, 0.0)).norm() < 1e-12); // phases are -1
        }

        let swapped = ExtremalBasis::external(&f, vec![e(2, 1), e(2, 0)]).unwrap();
        assert!(!are_equivalent(&b, &swapped).equivalent);
    }

    #[test]
    fn equivalence_complex_phase_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let f = crate::random::random_norm(ScalarField::Complex, 3, 6, &mut rng).unwrap();
        let b = maximal_basis(&f).unwrap();
        let rotated: Vec<Vector> = b
            .vectors()
            .iter()
            .enumerate()
            .map(|(i, v)| v.scale(Complex64::from_polar(1.0, 0.3 + i as f64)))
            .collect();
        let e = ExtremalBasis::external(&f, rotated).unwrap();
        let rep = are_equivalent(&b, &e);
        assert!(rep.equivalent);
        // The recovered phases realign the pair: ||e_i - alpha_i b_i|| small.
        for (i, p) in rep.phases.unwrap().into_iter().enumerate() {
            assert!((p.norm() - 1.0).abs() < tol::PHASE);
            let realigned = e.vectors()[i].sub(&b.vectors()[i].scale(p)).unwrap();
            assert!(realigned.norm2() <= tol::EQUIVALENCE);
        }
    }

    #[test]
    fn greedy_step_optimality_random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let f = crate::random::random_norm(ScalarField::Real, 3, 8, &mut rng).unwrap();
        let bmin = minimal_basis(&f).unwrap();
        let bmax = maximal_basis(&f).unwrap();
        for k in 0..3 {
            let span_min = linalg::gram_schmidt(&bmin.vectors()[..k])
                .unwrap_or_else(|_| Subspace::trivial(ScalarField::Real, 3));
            let span_min = if k == 0 {
                Subspace::trivial(ScalarField::Real, 3)
            } else {
                span_min
            };
            let comp_min = linalg::orthogonal_complement(&span_min);
            let span_max = if k == 0 {
                Subspace::trivial(ScalarField::Real, 3)
            } else {
                linalg::gram_schmidt(&bmax.vectors()[..k]).unwrap()
            };
            let comp_max = linalg::orthogonal_complement(&span_max);
            for _ in 0..1000 {
                let x: Vec<Complex64> = (0..comp_min.dim())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                    .collect();
                let w = comp_min.from_coords(&x);
                if w.norm2() < 1e-6 {
                    continue;
                }
                let w = w.normalize().unwrap();
                assert!(bmin.values()[k] <= f.evaluate(&w).unwrap() + 1e-8);

                let y: Vec<Complex64> = (0..comp_max.dim())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                    .collect();
                let w = comp_max.from_coords(&y);
                if w.norm2() < 1e-6 {
                    continue;
                }
                let w = w.normalize().unwrap();
                assert!(bmax.values()[k] >= f.evaluate(&w).unwrap() - 1e-8);
            }
        }
    }

    #[test]
    fn maximal_prefix_is_maximal_for_its_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..10 {
            let f = crate::random::random_norm(ScalarField::Real, 4, 9, &mut rng).unwrap();
            let b = maximal_basis(&f).unwrap();
            for k in 1..=3 {
                let span = linalg::gram_schmidt(&b.vectors()[..k]).unwrap();
                let restricted = f.restrict(&span).unwrap().to_norm_spec().unwrap();
                let sub = maximal_basis(&restricted).unwrap();
                // The prefix expressed in span coordinates must be equivalent
                // to the recomputed maximal basis of the restriction.
                let prefix_coords: Vec<Vector> = b.vectors()[..k]
                    .iter()
                    .map(|v| Vector::from_parts(ScalarField::Real, span.coords_of(v)))
                    .collect();
                let prefix = ExtremalBasis::external(&restricted, prefix_coords).unwrap();
                assert!(are_equivalent(&sub, &prefix).equivalent);
                for (x, y) in sub.values().iter().zip(prefix.values()) {
                    assert!((x - y).abs() <= 1e-9 * x.max(1.0));
                }
            }
        }
    }

    #[test]
    fn first_maximal_vector_bound() {
        // f(u) >= |<u, v0>| f(v0) when v0 maximizes f on the sphere.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let f = crate::random::random_norm(ScalarField::Real, 3, 7, &mut rng).unwrap();
        let b = maximal_basis(&f).unwrap();
        let v0 = &b.vectors()[0];
        let fv0 = b.values()[0];
        for _ in 0..10_000 {
            let u = crate::random::random_vector(ScalarField::Real, 3, &mut rng);
            let lhs = f.evaluate(&u).unwrap();
            let rhs = u.inner_unchecked(v0).norm() * fv0;
            assert!(lhs >= rhs - 1e-9);
        }
    }

    #[test]
    fn uniqueness_across_seeds_for_min_construction() {
        let out = crate::construct::build_min_construction(3, 0.05).unwrap();
        let mut bases = Vec::new();
        for seed in [1u64, 99, 4242] {
            bases.push(minimal_basis_seeded(&out.norm, seed).unwrap());
        }
        for pair in bases.windows(2) {
            assert!(are_equivalent(&pair[0], &pair[1]).equivalent);
        }
    }
}
