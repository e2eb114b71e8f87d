//! Generators for the two sharp lower-bound families whose witness ratios
//! approach `2^n - 1`.
//!
//! Min family (parameter `s` in (0,1)): a recursion from level n down to 1
//! doubles the support at every level with scale factors `1/(s(2s+1))` and
//! `1/(s^2(2s+1))`, signed by the inner product with the current witness;
//! the witness recursion is `v_(i-1) = e_(i-1) + 2 s^2 v_(i)`. The standard
//! basis is the (unique up to equivalence) f-minimal basis, and the witness
//! ratio tends to `2^n - 1` as `s -> 0`.
//!
//! Max family (parameters `c` in (0,1), `alpha` in (0,pi)): support vectors
//! `u_k = c^(k-1) u'_k` with `u'_(k+1) = sum_(j<=k) e_j sin^(j-1)(alpha)
//! cos(alpha) + e_(k+1) sin^k(alpha)`; the standard basis is f-maximal with
//! `f(e_i) = c^(i-1) sin^(i-1)(alpha)`, the witness has weights
//! `w_i = tan^(i-1)(alpha/2)` and `f(w) = w_1`, and the predicted ratio is
//! the closed form `sum_i (2 c sin^2(alpha/2))^(i-1)`.

use crate::error::{Error, Result};
use crate::extremal::{self, BasisKind, ExtremalBasis};
use crate::linalg::{ScalarField, Vector};
use crate::norm::NormSpec;
use crate::tol;
use crate::verify;

/// Parameters a construction was generated from.
#[derive(Clone, Copy, Debug)]
pub enum ConstructionParams {
    Min { n: usize, s: f64 },
    Max { n: usize, c: f64, alpha: f64 },
}

/// A generated norm together with its expected extremal basis, the sharpness
/// witness, and (for the max family) the closed-form predicted ratio.
#[derive(Clone, Debug)]
pub struct ConstructionOutput {
    pub norm: NormSpec,
    pub expected_basis: ExtremalBasis,
    pub witness: Vector,
    pub predicted_ratio: Option<f64>,
    pub params: ConstructionParams,
}

/// Which family a construction belongs to (mirrors the basis kind).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionMode {
    Min,
    Max,
}

/// Outcome of [`verify_construction`].
#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub basis_equivalent: bool,
    pub measured_ratio: f64,
    pub witness_value: f64,
    pub predicted_ratio: Option<f64>,
    /// Measured ratio at least the predicted one (max family only).
    pub predicted_ok: Option<bool>,
    /// Measured ratio within the `2^n - 1` theorem bound.
    pub bound_ok: bool,
    pub ok: bool,
}

/// Build the min-family construction. `s` below 1e-4 is rejected: the level
/// scale factor `1/(s^2(2s+1))` would exceed ~1e8 per level and stack up to
/// uncontrolled magnitudes.
pub fn build_min_construction(n: usize, s: f64) -> Result<ConstructionOutput> {
    if n < 1 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", format!("{s} outside (0,1)")));
    }
    if s < 1e-4 {
        return Err(Error::param(
            "s",
            "below 1e-4 the scale factors lose precision",
        ));
    }

    let field = ScalarField::Real;
    let e = |i: usize| Vector::standard_basis(field, n, i);

    // Level n: support {e_n}, witness e_n. Levels run i = n, n-1, ..., 1
    // (1-based); vectors live in span(e_i, ..., e_n) throughout.
    let mut support = vec![e(n - 1)];
    let mut witness = e(n - 1);
    let a = 1.0 / (s * (2.0 * s + 1.0));
    let b = 1.0 / (s * s * (2.0 * s + 1.0));
    for i in (1..n).rev() {
        // Split by the sign of <v, u> and attach e_(i-1) with the scale
        // factor whose sign keeps the witness pairing controlled.
        let ei = e(i - 1);
        let mut next = Vec::with_capacity(2 * support.len());
        for u in &support {
            let positive = witness.inner_unchecked(u).re >= 0.0;
            let (near, far) = if positive { (a, -b) } else { (-a, b) };
            next.push(ei.add(&u.scale_real(near)).expect("same space"));
            next.push(ei.add(&u.scale_real(far)).expect("same space"));
        }
        support = next;
        witness = ei
            .add(&witness.scale_real(2.0 * s * s))
            .expect("same space");
    }

    let norm = NormSpec::new(field, n, support)?;
    let vectors: Vec<Vector> = (0..n).map(e).collect();
    let values: Result<Vec<f64>> = vectors.iter().map(|v| norm.evaluate(v)).collect();
    let expected_basis = ExtremalBasis::from_parts(BasisKind::Minimal, vectors, values?)?;
    Ok(ConstructionOutput {
        norm,
        expected_basis,
        witness,
        predicted_ratio: None,
        params: ConstructionParams::Min { n, s },
    })
}

/// Build the max-family construction. `alpha` must stay at least 1e-6 away
/// from pi so the witness weights `tan^(i-1)(alpha/2)` stay finite.
pub fn build_max_construction(n: usize, c: f64, alpha: f64) -> Result<ConstructionOutput> {
    if n < 1 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::param("c", format!("{c} outside (0,1)")));
    }
    if !(alpha > 0.0 && alpha <= std::f64::consts::PI - 1e-6) {
        return Err(Error::param(
            "alpha",
            format!("{alpha} outside (0, pi - 1e-6]"),
        ));
    }

    let field = ScalarField::Real;
    let (sin_a, cos_a) = alpha.sin_cos();
    let mut support = Vec::with_capacity(n);
    for k in 0..n {
        // u'_(k+1) has coordinates sin^(j-1)(alpha) cos(alpha) for j <= k and
        // sin^k(alpha) at position k+1; scaled by c^k.
        let scale = c.powi(k as i32);
        let mut coords = vec![0.0f64; n];
        for (j, cj) in coords.iter_mut().enumerate().take(k) {
            *cj = scale * sin_a.powi(j as i32) * cos_a;
        }
        coords[k] = scale * sin_a.powi(k as i32);
        support.push(Vector::real(&coords)?);
    }
    let norm = NormSpec::new(field, n, support)?;

    let half = 0.5 * alpha;
    let t = half.tan();
    let w_coords: Vec<f64> = (0..n).map(|i| t.powi(i as i32)).collect();
    let witness = Vector::real(&w_coords)?;

    let x = 2.0 * c * half.sin().powi(2);
    let predicted_ratio = (0..n).map(|i| x.powi(i as i32)).sum::<f64>();

    let vectors: Vec<Vector> = (0..n)
        .map(|i| Vector::standard_basis(field, n, i))
        .collect();
    let values: Result<Vec<f64>> = vectors.iter().map(|v| norm.evaluate(v)).collect();
    let expected_basis = ExtremalBasis::from_parts(BasisKind::Maximal, vectors, values?)?;
    Ok(ConstructionOutput {
        norm,
        expected_basis,
        witness,
        predicted_ratio: Some(predicted_ratio),
        params: ConstructionParams::Max { n, c, alpha },
    })
}

/// Re-derive the extremal basis, measure the witness ratio, and check it
/// against the prediction (max family) and the `2^n - 1` bound.
pub fn verify_construction(
    out: &ConstructionOutput,
    mode: ConstructionMode,
) -> Result<ConstructionReport> {
    let recomputed = match mode {
        ConstructionMode::Min => extremal::minimal_basis(&out.norm)?,
        ConstructionMode::Max => extremal::maximal_basis(&out.norm)?,
    };
    let basis_equivalent = extremal::are_equivalent(&recomputed, &out.expected_basis).equivalent;

    let witness_value = out.norm.evaluate(&out.witness)?;
    let weighted = verify::weighted_l1(&out.norm, &out.expected_basis, &out.witness)?;
    let measured_ratio = weighted / witness_value;

    let n = out.norm.dim() as u32;
    let bound = 2f64.powi(n as i32) - 1.0;
    let bound_ok = measured_ratio <= bound + tol::RATIO_SLACK;
    let predicted_ok = out.predicted_ratio.map(|p| measured_ratio >= p - 1e-9);
    let ok = basis_equivalent && bound_ok && predicted_ok.unwrap_or(true);
    Ok(ConstructionReport {
        basis_equivalent,
        measured_ratio,
        witness_value,
        predicted_ratio: out.predicted_ratio,
        predicted_ok,
        bound_ok,
        ok,
    })
}
