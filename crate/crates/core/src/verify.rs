//! Inverted-triangle ratio measurement and the derived property checks.
//!
//! The central quantity is `sup_v sum_i |<v,b_i>| f(b_i) / f(v)`. On real
//! spaces at desk scale the supremum is certified by enumerating the
//! vertices of the unit-ball polytope `{v : |<v,u>| <= 1}`: the numerator is
//! convex and the ratio scale-invariant, so the optimum sits at a vertex.
//! Everywhere else a multi-start projected subgradient ascent (with a vertex
//! snap in the real case) provides a best-effort maximizer.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extremal::{BasisKind, ExtremalBasis};
use crate::linalg::{ScalarField, Subspace, Vector};
use crate::norm::NormSpec;
use crate::random;
use crate::solve::solve_square;
use crate::tol;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How the reported ratio was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioMethod {
    VertexEnum,
    MultistartAscent,
    WitnessOnly,
}

impl RatioMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RatioMethod::VertexEnum => "vertex-enum",
            RatioMethod::MultistartAscent => "multistart-ascent",
            RatioMethod::WitnessOnly => "witness-only",
        }
    }
}

/// Measured worst-case (or witness) ratio against the `2^n - 1` bound.
#[derive(Clone, Debug)]
pub struct RatioReport {
    pub ratio: f64,
    pub witness: Vector,
    pub method: RatioMethod,
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyKind {
    Pf,
    HPf,
}

/// Outcome of a `P_f` / `HP_f` style check. A counterexample carries the
/// violating vector and the suffix index it was found at (0 for `P_f`).
/// `premises_failed` is set only by the inversion check.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub property: PropertyKind,
    pub constants: Vec<f64>,
    pub holds: bool,
    pub counterexample: Option<(Vector, usize)>,
    pub premises_failed: Option<String>,
}

/// `sum_i |<v, b_i>| f(b_i)` with the stored basis values as weights.
pub fn weighted_l1(f: &NormSpec, basis: &ExtremalBasis, v: &Vector) -> Result<f64> {
    if basis.field() != f.field() || v.field() != f.field() {
        return Err(Error::FieldMismatch(f.field(), v.field()));
    }
    if basis.dim() != f.dim() || v.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: v.dim(),
        });
    }
    Ok(basis
        .vectors()
        .iter()
        .zip(basis.values())
        .map(|(b, &fb)| v.inner_unchecked(b).norm() * fb)
        .sum())
}

fn theorem_bound(n: usize) -> f64 {
    2f64.powi(n as i32) - 1.0
}

fn ratio_at(f: &NormSpec, basis: &ExtremalBasis, v: &Vector) -> Result<f64> {
    let fv = f.evaluate(v)?;
    if fv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(weighted_l1(f, basis, v)? / fv)
}

/// Ratio at a caller-supplied witness vector.
pub fn witness_ratio(f: &NormSpec, basis: &ExtremalBasis, v: &Vector) -> Result<RatioReport> {
    let ratio = ratio_at(f, basis, v)?;
    let bound = theorem_bound(f.dim());
    Ok(RatioReport {
        ratio,
        witness: v.clone(),
        method: RatioMethod::WitnessOnly,
        bound,
        satisfied: ratio <= bound + tol::RATIO_SLACK,
    })
}

/// Supremum of the weighted-l1-to-norm ratio over nonzero vectors.
///
/// Real field with `n <= 4`, `|U| <= 64` and at most 1e6 candidate subsets:
/// exact vertex enumeration. Otherwise multi-start ascent.
pub fn upper_ratio(f: &NormSpec, basis: &ExtremalBasis) -> Result<RatioReport> {
    if basis.len() != f.dim() {
        return Err(Error::param("basis", "must span the whole space"));
    }
    if basis.field() != f.field() || basis.dim() != f.dim() {
        return Err(Error::param("basis", "field or dimension mismatch"));
    }
    let n = f.dim();
    let m = f.support().len();
    let enumerable =
        f.field() == ScalarField::Real && n <= 4 && m <= 64 && binomial(2 * m, n) <= 1_000_000;
    let best = if enumerable {
        vertex_enum_best(f, basis)
    } else {
        None
    };
    let (ratio0, witness, method) = match best {
        Some((r, w)) => (r, w, RatioMethod::VertexEnum),
        None => {
            let (r, w) = ascent_best(f, basis);
            (r, w, RatioMethod::MultistartAscent)
        }
    };
    // Re-derive the ratio from the stored witness so the reported pair is
    // exactly consistent.
    let ratio = ratio_at(f, basis, &witness).unwrap_or(ratio0);
    let bound = theorem_bound(n);
    Ok(RatioReport {
        ratio,
        witness,
        method,
        bound,
        satisfied: ratio <= bound + tol::RATIO_SLACK,
    })
}

fn binomial(m: usize, n: usize) -> u64 {
    let mut acc: u64 = 1;
    for k in 0..n {
        acc = acc.saturating_mul((m - k) as u64) / (k as u64 + 1);
    }
    acc
}

fn for_each_combination(m: usize, n: usize, out: &mut Vec<[usize; 4]>) {
    debug_assert!((1..=4).contains(&n));
    let mut idx = [0usize; 4];
    for (i, v) in idx.iter_mut().enumerate().take(n) {
        *v = i;
    }
    loop {
        out.push(idx);
        // Advance the lexicographic odometer.
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < m - (n - i) {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact maximum over the vertices of `{v : |<v,u>| <= 1}`. For every
/// n-subset of support rows and every sign pattern (first sign fixed, since
/// v and -v give the same ratio) solve the binding system and keep feasible
/// solutions. Returns None when no feasible vertex was found, which only
/// happens under numerical degeneracy; the caller then falls back to ascent.
fn vertex_enum_best(f: &NormSpec, basis: &ExtremalBasis) -> Option<(f64, Vector)> {
    let n = f.dim();
    let m = f.support().len();
    let rows: Vec<Vec<f64>> = f
        .support()
        .iter()
        .map(|u| u.coords().iter().map(|z| z.re).collect())
        .collect();
    let mut combos = Vec::new();
    for_each_combination(m, n, &mut combos);

    let chunk = 4096.max(combos.len() / 256 + 1);
    let chunk_bests: Vec<Option<(f64, Vector)>> = combos
        .par_chunks(chunk)
        .map(|chunk| {
            let mut best: Option<(f64, Vector)> = None;
            for combo in chunk {
                for bits in 0..(1u32 << (n - 1)) {
                    let mut a = Vec::with_capacity(n * n);
                    let mut rhs = vec![1.0; n];
                    for (j, r) in rhs.iter_mut().enumerate().take(n) {
                        if j > 0 && (bits >> (j - 1)) & 1 == 1 {
                            *r = -1.0;
                        }
                    }
                    for j in 0..n {
                        a.extend_from_slice(&rows[combo[j]]);
                    }
                    let Some(v) = solve_square(a, rhs, n) else {
                        continue;
                    };
                    if v.iter().any(|x| !x.is_finite()) {
                        continue;
                    }
                    // Feasibility against every constraint.
                    let mut feasible = true;
                    for row in &rows {
                        let mut ip = 0.0;
                        for (rv, xv) in row.iter().zip(v.iter()) {
                            ip += rv * xv;
                        }
                        if ip.abs() > 1.0 + tol::FEASIBILITY {
                            feasible = false;
                            break;
                        }
                    }
                    if !feasible {
                        continue;
                    }
                    let vec = Vector::real(&v).ok()?;
                    let fv = f.eval_unchecked(&vec);
                    if fv <= 0.0 {
                        continue;
                    }
                    let w = weighted_l1(f, basis, &vec).ok()?;
                    let ratio = w / fv;
                    let cand = vec
                        .normalize()
                        .expect("feasible vertex is nonzero")
                        .canonicalized();
                    best = merge_best(best, (ratio, cand));
                }
            }
            best
        })
        .collect();

    let mut best: Option<(f64, Vector)> = None;
    for cb in chunk_bests.into_iter().flatten() {
        best = merge_best(best, cb);
    }
    best
}

fn merge_best(best: Option<(f64, Vector)>, cand: (f64, Vector)) -> Option<(f64, Vector)> {
    match best {
        None => Some(cand),
        Some((bv, bw)) => {
            let tie = tol::scaled(1e-12, bv);
            if cand.0 > bv + tie {
                Some(cand)
            } else if (cand.0 - bv).abs() <= tie && cand.1.lex_cmp(&bw) == std::cmp::Ordering::Less
            {
                Some((bv.max(cand.0), cand.1))
            } else {
                Some((bv, bw))
            }
        }
    }
}

/// Real-parametrized rows of a family of vectors, for the ascent code path.
struct Rows {
    complex: bool,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Rows {
    fn build(vs: &[Vector], complex: bool) -> Rows {
        let mut re = Vec::with_capacity(vs.len());
        let mut im = Vec::with_capacity(vs.len());
        for v in vs {
            let n = v.dim();
            let rd = if complex { 2 * n } else { n };
            let mut row_re = vec![0.0; rd];
            let mut row_im = vec![0.0; rd];
            for (j, z) in v.coords().iter().enumerate() {
                if complex {
                    row_re[2 * j] = z.re;
                    row_re[2 * j + 1] = z.im;
                    row_im[2 * j] = -z.im;
                    row_im[2 * j + 1] = z.re;
                } else {
                    row_re[j] = z.re;
                }
            }
            re.push(row_re);
            if complex {
                im.push(row_im);
            }
        }
        Rows { complex, re, im }
    }

    fn value(&self, a: usize, x: &[f64]) -> f64 {
        let p = dot(&self.re[a], x);
        if self.complex {
            let q = dot(&self.im[a], x);
            (p * p + q * q).sqrt()
        } else {
            p.abs()
        }
    }

    fn z_row(&self, a: usize, x: &[f64]) -> Vec<f64> {
        let p = dot(&self.re[a], x);
        if !self.complex {
            let s = if p < 0.0 { -1.0 } else { 1.0 };
            return self.re[a].iter().map(|&v| s * v).collect();
        }
        let q = dot(&self.im[a], x);
        let m = (p * p + q * q).sqrt();
        if m == 0.0 {
            return self.re[a].clone();
        }
        self.re[a]
            .iter()
            .zip(self.im[a].iter())
            .map(|(&r, &i)| (p * r + q * i) / m)
            .collect()
    }

    fn len(&self) -> usize {
        self.re.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn to_real(v: &Vector, complex: bool) -> Vec<f64> {
    if complex {
        let mut out = Vec::with_capacity(2 * v.dim());
        for z in v.coords() {
            out.push(z.re);
            out.push(z.im);
        }
        out
    } else {
        v.coords().iter().map(|z| z.re).collect()
    }
}

fn from_real(field: ScalarField, x: &[f64]) -> Vector {
    match field {
        ScalarField::Real => Vector::real(x).expect("finite iterate"),
        ScalarField::Complex => {
            let coords: Vec<(f64, f64)> = x.chunks(2).map(|c| (c[0], c[1])).collect();
            Vector::complex(&coords).expect("finite iterate")
        }
    }
}

/// Multi-start projected subgradient ascent on the scale-invariant ratio,
/// with a vertex snap in the real case. Deterministic start set and merge.
fn ascent_best(f: &NormSpec, basis: &ExtremalBasis) -> (f64, Vector) {
    const ITERS: usize = 300;
    const RANDOM_STARTS: usize = 32;

    let complex = f.field() == ScalarField::Complex;
    let supports = Rows::build(f.support(), complex);
    let rows_basis = Rows::build(basis.vectors(), complex);
    let weights = basis.values();
    let rd = if complex { 2 * f.dim() } else { f.dim() };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for b in basis.vectors() {
        starts.push(to_real(b, complex));
    }
    for u in f.support() {
        if let Ok(un) = u.normalize() {
            starts.push(to_real(&un, complex));
        }
    }
    if !complex && f.dim() <= 8 {
        // All +/- combinations of the basis vectors (first sign fixed).
        let n = f.dim();
        for bits in 0..(1u32 << (n - 1)) {
            let mut x = vec![0.0; rd];
            for (i, b) in basis.vectors().iter().enumerate() {
                let s = if i > 0 && (bits >> (i - 1)) & 1 == 1 {
                    -1.0
                } else {
                    1.0
                };
                for (xv, z) in x.iter_mut().zip(b.coords()) {
                    *xv += s * z.re;
                }
            }
            if let Some(u) = unit(&x) {
                starts.push(u);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_STARTS {
        let v = random::random_unit_vector(f.field(), f.dim(), &mut rng);
        starts.push(to_real(&v, complex));
    }

    let eval_ratio = |x: &[f64]| -> f64 {
        let mut num = 0.0;
        for (i, w) in weights.iter().enumerate() {
            num += w * rows_basis.value(i, x);
        }
        let mut den = 0.0f64;
        for a in 0..supports.len() {
            den = den.max(supports.value(a, x));
        }
        if den <= 0.0 {
            return 0.0;
        }
        num / den
    };

    let outcomes: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|x0| {
            let mut x = x0.clone();
            let mut best = (eval_ratio(&x), x.clone());
            for k in 1..=ITERS {
                // Subgradient of log(num) - log(den).
                let mut num = 0.0;
                let mut gnum = vec![0.0; rd];
                for (i, w) in weights.iter().enumerate() {
                    let v = rows_basis.value(i, &x);
                    num += w * v;
                    let z = rows_basis.z_row(i, &x);
                    for (g, zi) in gnum.iter_mut().zip(z.iter()) {
                        *g += w * zi;
                    }
                }
                let mut den = -1.0;
                let mut den_idx = 0;
                for a in 0..supports.len() {
                    let v = supports.value(a, &x);
                    if v > den {
                        den = v;
                        den_idx = a;
                    }
                }
                if num <= 0.0 || den <= 0.0 {
                    break;
                }
                let gden = supports.z_row(den_idx, &x);
                let mut g: Vec<f64> = gnum
                    .iter()
                    .zip(gden.iter())
                    .map(|(&a, &b)| a / num - b / den)
                    .collect();
                let radial = dot(&g, &x);
                for (gi, xi) in g.iter_mut().zip(x.iter()) {
                    *gi -= radial * xi;
                }
                let gn = norm(&g);
                if gn <= 1e-15 {
                    break;
                }
                let step = std::f64::consts::FRAC_PI_2 / k as f64;
                for (xi, gi) in x.iter_mut().zip(g.iter()) {
                    *xi += step * gi / gn;
                }
                match unit(&x) {
                    Some(u) => x = u,
                    None => break,
                }
                let r = eval_ratio(&x);
                if r > best.0 {
                    best = (r, x.clone());
                }
            }
            // Vertex snap (real only): bind the n largest support constraints
            // with their current signs and solve for the vertex.
            if !complex {
                let n = f.dim();
                if supports.len() >= n {
                    let mut order: Vec<usize> = (0..supports.len()).collect();
                    order.sort_by(|&a, &b| {
                        supports
                            .value(b, &best.1)
                            .partial_cmp(&supports.value(a, &best.1))
                            .expect("finite")
                            .then(a.cmp(&b))
                    });
                    let mut a = Vec::with_capacity(n * n);
                    let mut rhs = Vec::with_capacity(n);
                    for &idx in order.iter().take(n) {
                        a.extend_from_slice(&supports.re[idx]);
                        rhs.push(if dot(&supports.re[idx], &best.1) < 0.0 {
                            -1.0
                        } else {
                            1.0
                        });
                    }
                    if let Some(v) = solve_square(a, rhs, n) {
                        if v.iter().all(|t| t.is_finite()) {
                            let feasible = (0..supports.len())
                                .all(|i| dot(&supports.re[i], &v).abs() <= 1.0 + tol::FEASIBILITY);
                            if feasible {
                                if let Some(u) = unit(&v) {
                                    let r = eval_ratio(&u);
                                    if r > best.0 {
                                        best = (r, u);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            best
        })
        .collect();

    let mut best: Option<(f64, Vector)> = None;
    for (r, x) in outcomes {
        let w = from_real(f.field(), &x).canonicalized();
        best = merge_best(best, (r, w));
    }
    best.expect("at least one start")
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n <= 1e-14 || !n.is_finite() {
        return None;
    }
    Some(a.iter().map(|&x| x / n).collect())
}

/// Result of [`lower_side_check`].
#[derive(Clone, Debug)]
pub struct LowerSideReport {
    pub ok: bool,
    pub checked: usize,
    pub counterexample: Option<Vector>,
}

/// Check the easy direction `f(v) <= sum_i |<v,b_i>| f(b_i)` on random unit
/// vectors plus all support directions and all basis vectors.
pub fn lower_side_check(
    f: &NormSpec,
    basis: &ExtremalBasis,
    samples: usize,
    seed: u64,
) -> Result<LowerSideReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<Vector> = basis.vectors().to_vec();
    for u in f.support() {
        probes.push(u.normalize()?);
    }
    for _ in 0..samples {
        probes.push(random::random_unit_vector(f.field(), f.dim(), &mut rng));
    }
    let checked = probes.len();
    for v in probes {
        let fv = f.evaluate(&v)?;
        let w = weighted_l1(f, basis, &v)?;
        if fv > w + tol::scaled(1e-9, fv) {
            return Ok(LowerSideReport {
                ok: false,
                checked,
                counterexample: Some(v),
            });
        }
    }
    Ok(LowerSideReport {
        ok: true,
        checked,
        counterexample: None,
    })
}

/// `P_f(c)`: the inverted triangle inequality holds with constant `c` for
/// every coefficient vector, i.e. the worst-case ratio is at most `c`.
pub fn check_pf(f: &NormSpec, basis: &ExtremalBasis, c: f64) -> Result<PropertyReport> {
    let report = upper_ratio(f, basis)?;
    let holds = report.ratio <= c + tol::RATIO_SLACK;
    Ok(PropertyReport {
        property: PropertyKind::Pf,
        constants: vec![c],
        holds,
        counterexample: if holds {
            None
        } else {
            Some((report.witness, 0))
        },
        premises_failed: None,
    })
}

/// `HP_f(c_1..c_n)`: for every suffix span `(e_i..e_n)` the restricted
/// worst-case ratio is at most `c_i`. The basis must be ordered with
/// non-decreasing values.
pub fn check_hpf(f: &NormSpec, basis: &ExtremalBasis, cs: &[f64]) -> Result<PropertyReport> {
    let n = f.dim();
    if basis.len() != n {
        return Err(Error::param("basis", "must span the whole space"));
    }
    if cs.len() != n {
        return Err(Error::param("constants", format!("expected {n} constants")));
    }
    if !basis.is_sorted_ascending() {
        return Err(Error::UnorderedBasis);
    }
    for (i, &ci) in cs.iter().enumerate() {
        let tail = basis.vectors()[i..].to_vec();
        let sub = Subspace::from_orthonormal(f.field(), n, tail)?;
        let restricted = f.restrict(&sub)?.to_norm_spec()?;
        let coord_basis: Vec<Vector> = (0..sub.dim())
            .map(|j| Vector::standard_basis(f.field(), sub.dim(), j))
            .collect();
        let suffix = ExtremalBasis::external(&restricted, coord_basis)?;
        let report = upper_ratio(&restricted, &suffix)?;
        if report.ratio > ci + tol::RATIO_SLACK {
            let ambient = sub.from_coords(report.witness.coords());
            return Ok(PropertyReport {
                property: PropertyKind::HPf,
                constants: cs.to_vec(),
                holds: false,
                counterexample: Some((ambient, i)),
                premises_failed: None,
            });
        }
    }
    Ok(PropertyReport {
        property: PropertyKind::HPf,
        constants: cs.to_vec(),
        holds: true,
        counterexample: None,
        premises_failed: None,
    })
}

/// Per-index value ratios `f(b_i)/f(e_i)` of two bases (each re-sorted to
/// non-decreasing values) with the applicable comparability bounds.
#[derive(Clone, Debug)]
pub struct EquivalenceRatios {
    pub ratios: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub ok: bool,
}

/// Comparability bounds for the known kinds: a minimal basis contributes
/// `sqrt(i)` on its side, a maximal one `sqrt(i) (2^(n-i+1) - 1)`. External
/// bases need explicit hereditary constants via
/// [`equivalence_ratios_with_constants`].
pub fn equivalence_ratios(
    f: &NormSpec,
    b: &ExtremalBasis,
    e: &ExtremalBasis,
) -> Result<EquivalenceRatios> {
    equivalence_ratios_with_constants(f, b, e, None, None)
}

pub fn equivalence_ratios_with_constants(
    f: &NormSpec,
    b: &ExtremalBasis,
    e: &ExtremalBasis,
    b_constants: Option<&[f64]>,
    e_constants: Option<&[f64]>,
) -> Result<EquivalenceRatios> {
    let n = f.dim();
    if b.len() != n || e.len() != n {
        return Err(Error::param("basis", "must span the whole space"));
    }
    let bs = b.sorted_ascending();
    let es = e.sorted_ascending();

    // Upper factor for index i (1-based) contributed by the first basis and
    // mirrored as the reciprocal lower factor for the second.
    let side_factor = |kind: BasisKind, constants: Option<&[f64]>, i: usize| -> Result<f64> {
        let sqrt_i = (i as f64).sqrt();
        match kind {
            BasisKind::Minimal => Ok(sqrt_i),
            BasisKind::Maximal => Ok(sqrt_i * (2f64.powi((n - i + 1) as i32) - 1.0)),
            BasisKind::External => {
                let cs = constants.ok_or(Error::param(
                    "constants",
                    "external basis requires hereditary constants",
                ))?;
                if cs.len() != n {
                    return Err(Error::param("constants", format!("expected {n} constants")));
                }
                Ok(sqrt_i * cs[i - 1])
            }
        }
    };

    let mut ratios = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut ok = true;
    for i in 1..=n {
        let fb = bs.values()[i - 1];
        let fe = es.values()[i - 1];
        let r = fb / fe;
        let up = side_factor(b.kind(), b_constants, i)?;
        let lo = 1.0 / side_factor(e.kind(), e_constants, i)?;
        if r < lo / (1.0 + tol::RATIO_MULT) || r > up * (1.0 + tol::RATIO_MULT) {
            ok = false;
        }
        ratios.push(r);
        lower.push(lo);
        upper.push(up);
    }
    Ok(EquivalenceRatios {
        ratios,
        lower,
        upper,
        ok,
    })
}

/// The inversion proposition: if `B` satisfies `P_f(c1)`, the values of `B`
/// and `E` agree within factor `c`, and the off-diagonal mixing factor
/// `alpha = max |<b_i,e_j>| / |<e_i,b_j>|` is finite, then `E` satisfies
/// `P_f(alpha c^2 c1)`. The minimal feasible `alpha` is computed and
/// reported in `constants` as `[c, c1, alpha, alpha c^2 c1]`.
pub fn check_inversion(
    f: &NormSpec,
    b: &ExtremalBasis,
    e: &ExtremalBasis,
    c: f64,
    c1: f64,
) -> Result<PropertyReport> {
    let n = f.dim();
    if b.len() != n || e.len() != n {
        return Err(Error::param("basis", "must span the whole space"));
    }
    if c < 1.0 {
        return Err(Error::param("c", "comparability factor must be >= 1"));
    }
    let bs = b.sorted_ascending();
    let es = e.sorted_ascending();

    let fail = |msg: String| PropertyReport {
        property: PropertyKind::Pf,
        constants: vec![c, c1],
        holds: false,
        counterexample: None,
        premises_failed: Some(msg),
    };

    let premise_b = check_pf(f, &bs, c1)?;
    if !premise_b.holds {
        return Ok(fail(format!("first basis does not satisfy P_f({c1})")));
    }
    for i in 0..n {
        let fb = bs.values()[i];
        let fe = es.values()[i];
        let lo = fe / c * (1.0 - tol::RATIO_MULT);
        let hi = c * fe * (1.0 + tol::RATIO_MULT);
        if fb < lo || fb > hi {
            return Ok(fail(format!(
                "value {i} escapes the comparability sandwich: {fb} vs [{lo}, {hi}]"
            )));
        }
    }

    let mut alpha = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let forward = bs.vectors()[i].inner_unchecked(&es.vectors()[j]).norm();
            let backward = es.vectors()[i].inner_unchecked(&bs.vectors()[j]).norm();
            if backward <= tol::INNER_ZERO {
                if forward > tol::INNER_ZERO {
                    return Ok(fail(format!(
                        "pair ({i},{j}): <e_i,b_j> = 0 while <b_i,e_j> != 0"
                    )));
                }
                continue;
            }
            alpha = alpha.max(forward / backward);
        }
    }

    let conclusion = alpha * c * c * c1;
    let mut report = check_pf(f, &es, conclusion)?;
    report.constants = vec![c, c1, alpha, conclusion];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{are_equivalent, maximal_basis, minimal_basis, minimal_basis_seeded};
    use crate::norm::coordinate_support;
    use crate::sphere;
    use rand::Rng;

    fn r(coords: &[f64]) -> Vector {
        Vector::real(coords).unwrap()
    }

    fn e(dim: usize, i: usize) -> Vector {
        Vector::standard_basis(ScalarField::Real, dim, i)
    }

    fn linf2() -> NormSpec {
        coordinate_support(ScalarField::Real, 2)
    }

    fn standard_basis(f: &NormSpec) -> ExtremalBasis {
        let vectors = (0..f.dim()).map(|i| e(f.dim(), i)).collect();
        ExtremalBasis::external(f, vectors).unwrap()
    }

    #[test]
    fn weighted_l1_examples() {
        let f = linf2();
        let b = standard_basis(&f);
        assert_eq!(weighted_l1(&f, &b, &r(&[1.0, 1.0])).unwrap(), 2.0);
        assert_eq!(
            weighted_l1(&f, &b, &Vector::zero(ScalarField::Real, 2)).unwrap(),
            0.0
        );
        let bmin = minimal_basis(&f).unwrap();
        // (1/sqrt2)(1/sqrt2) * 2 terms = 1.
        let w = weighted_l1(&f, &bmin, &r(&[1.0, 0.0])).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_ratio_linf_maximal_is_two() {
        let f = linf2();
        let b = maximal_basis(&f).unwrap();
        let rep = upper_ratio(&f, &b).unwrap();
        assert_eq!(rep.method, RatioMethod::VertexEnum);
        assert!((rep.ratio - 2.0).abs() < 1e-12, "ratio {}", rep.ratio);
        assert!(rep.satisfied); // bound 3
                                // Witness on a diagonal.
        let w = &rep.witness;
        assert!((w.coord(0).re.abs() - w.coord(1).re.abs()).abs() < 1e-9);
    }

    #[test]
    fn upper_ratio_linf_minimal_is_one() {
        let f = linf2();
        let b = minimal_basis(&f).unwrap();
        let rep = upper_ratio(&f, &b).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-12, "ratio {}", rep.ratio);
    }

    #[test]
    fn upper_ratio_dimension_one() {
        let f = NormSpec::new(ScalarField::Real, 1, vec![r(&[3.0])]).unwrap();
        let b = minimal_basis(&f).unwrap();
        let rep = upper_ratio(&f, &b).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-12);
        assert_eq!(rep.bound, 1.0);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let f = crate::random::random_norm(ScalarField::Real, 3, 6, &mut rng).unwrap();
        let b = maximal_basis(&f).unwrap();
        for _ in 0..100 {
            let v = crate::random::random_vector(ScalarField::Real, 3, &mut rng);
            if v.norm2() < 1e-3 {
                continue;
            }
            let lambda = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            let r1 = ratio_at(&f, &b, &v).unwrap();
            let r2 = ratio_at(&f, &b, &v.scale_real(lambda)).unwrap();
            assert!((r1 - r2).abs() <= 1e-12 * r1.max(1.0));
        }
    }

    #[test]
    fn vertex_enum_and_ascent_agree_on_real_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for round in 0..25 {
            let n = 2 + round % 2; // dims 2 and 3
            let f =
                crate::random::random_norm(ScalarField::Real, n, 5 + round % 4, &mut rng).unwrap();
            let b = maximal_basis(&f).unwrap();
            let enum_rep = upper_ratio(&f, &b).unwrap();
            assert_eq!(enum_rep.method, RatioMethod::VertexEnum);
            let (ascent_ratio, _) = ascent_best(&f, &b);
            assert!(
                (enum_rep.ratio - ascent_ratio).abs() <= 1e-8 * enum_rep.ratio.max(1.0),
                "round {round}: enum {} vs ascent {}",
                enum_rep.ratio,
                ascent_ratio
            );
        }
    }

    #[test]
    fn sandwich_bounds_for_extremal_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let f = crate::random::random_norm(ScalarField::Real, n, 2 * n + 3, &mut rng).unwrap();
            for basis in [minimal_basis(&f).unwrap(), maximal_basis(&f).unwrap()] {
                let rep = upper_ratio(&f, &basis).unwrap();
                assert!(rep.ratio >= 1.0 - 1e-9);
                assert!(rep.ratio <= theorem_bound(n) + tol::RATIO_SLACK);
            }
        }
    }

    #[test]
    fn lower_side_examples() {
        let f = linf2();
        let bmax = maximal_basis(&f).unwrap();
        let rep = lower_side_check(&f, &bmax, 10_000, 5).unwrap();
        assert!(rep.ok, "counterexample: {:?}", rep.counterexample);

        let out = crate::construct::build_min_construction(3, 0.05).unwrap();
        let rep = lower_side_check(&out.norm, &out.expected_basis, 10_000, 6).unwrap();
        assert!(rep.ok);
    }

    #[test]
    fn check_pf_examples() {
        let f = linf2();
        let bmin = minimal_basis(&f).unwrap();
        assert!(check_pf(&f, &bmin, 3.0).unwrap().holds);

        let bmax = maximal_basis(&f).unwrap();
        let rep = check_pf(&f, &bmax, 1.5).unwrap();
        assert!(!rep.holds);
        let (cx, _) = rep.counterexample.unwrap();
        assert!((cx.coord(0).re.abs() - cx.coord(1).re.abs()).abs() < 1e-9);

        let exact = upper_ratio(&f, &bmax).unwrap().ratio;
        assert!(check_pf(&f, &bmax, exact).unwrap().holds);
    }

    #[test]
    fn check_hpf_maximal_cascade() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..10 {
            let n = rng.gen_range(2..=3);
            let f = crate::random::random_norm(ScalarField::Real, n, 2 * n + 2, &mut rng).unwrap();
            let b = maximal_basis(&f).unwrap().sorted_ascending();
            let cs: Vec<f64> = (1..=n)
                .map(|i| 2f64.powi((n - i + 1) as i32) - 1.0)
                .collect();
            let rep = check_hpf(&f, &b, &cs).unwrap();
            assert!(rep.holds, "HPf failed: {rep:?}");
        }
    }

    #[test]
    fn check_hpf_trailing_constant_one_suffices() {
        let f = linf2();
        let b = maximal_basis(&f).unwrap().sorted_ascending();
        // c_n = 1 always passes the single-vector suffix.
        let rep = check_hpf(&f, &b, &[3.0, 1.0]).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn pf_implies_uniform_hpf() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..5 {
            let f = crate::random::random_norm(ScalarField::Real, 3, 7, &mut rng).unwrap();
            let b = maximal_basis(&f).unwrap().sorted_ascending();
            let c = upper_ratio(&f, &b).unwrap().ratio;
            let rep = check_hpf(&f, &b, &[c, c, c]).unwrap();
            assert!(rep.holds);
        }
    }

    #[test]
    fn check_hpf_rejects_unordered() {
        let f = NormSpec::new(ScalarField::Real, 2, vec![r(&[2.0, 0.0]), r(&[0.0, 1.0])]).unwrap();
        let b = maximal_basis(&f).unwrap(); // values (2, 1): descending
        assert!(matches!(
            check_hpf(&f, &b, &[3.0, 1.0]),
            Err(Error::UnorderedBasis)
        ));
    }

    #[test]
    fn equivalence_ratios_identical_bases() {
        let f = linf2();
        let b = minimal_basis(&f).unwrap();
        let rep = equivalence_ratios(&f, &b, &b).unwrap();
        assert!(rep.ok);
        for r in rep.ratios {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalence_ratios_linf_min_vs_max() {
        let f = linf2();
        let bmin = minimal_basis(&f).unwrap();
        let bmax = maximal_basis(&f).unwrap();
        let rep = equivalence_ratios(&f, &bmin, &bmax).unwrap();
        assert!(rep.ok, "{rep:?}");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for r in &rep.ratios {
            assert!((r - s).abs() < 1e-9);
        }
        // i=1: 1/3 <= r <= 1; i=2: 1/sqrt(2) <= r <= sqrt(2).
        assert!((rep.lower[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((rep.upper[0] - 1.0).abs() < 1e-12);
        assert!((rep.lower[1] - s).abs() < 1e-12);
        assert!((rep.upper[1] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn equivalence_ratios_random_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for trial in 0..30 {
            let n = rng.gen_range(1..=3);
            let f = crate::random::random_norm(ScalarField::Real, n, 2 * n + 3, &mut rng).unwrap();
            let bmin = minimal_basis(&f).unwrap();
            let bmin2 = minimal_basis_seeded(&f, 1000 + trial).unwrap();
            let bmax = maximal_basis(&f).unwrap();
            assert!(equivalence_ratios(&f, &bmin, &bmin2).unwrap().ok);
            assert!(equivalence_ratios(&f, &bmin, &bmax).unwrap().ok);
            assert!(equivalence_ratios(&f, &bmax, &bmax).unwrap().ok);
        }
    }

    #[test]
    fn equivalence_ratios_external_requires_constants() {
        let f = linf2();
        let b = minimal_basis(&f).unwrap();
        let ext = standard_basis(&f);
        assert!(equivalence_ratios(&f, &b, &ext).is_err());
        let rep = equivalence_ratios_with_constants(&f, &b, &ext, None, Some(&[3.0, 1.0])).unwrap();
        assert!(rep.ok);
    }

    #[test]
    fn inversion_identity_case() {
        let f = linf2();
        let b = minimal_basis(&f).unwrap();
        let c1 = upper_ratio(&f, &b).unwrap().ratio + 1e-9;
        let rep = check_inversion(&f, &b, &b, 1.0, c1).unwrap();
        assert!(rep.premises_failed.is_none());
        assert!(rep.holds);
        assert!((rep.constants[2] - 1.0).abs() < 1e-12); // alpha = 1
    }

    #[test]
    fn inversion_small_rotation() {
        let f = linf2();
        let b = minimal_basis(&f).unwrap();
        // Small rotation of the minimal basis.
        let theta = 0.05f64;
        let (s, c) = theta.sin_cos();
        let b0 = &b.vectors()[0];
        let b1 = &b.vectors()[1];
        let e0 = b0.scale_real(c).add(&b1.scale_real(s)).unwrap();
        let e1 = b1.scale_real(c).sub(&b0.scale_real(s)).unwrap();
        let e = ExtremalBasis::external(&f, vec![e0, e1]).unwrap();
        let c1 = upper_ratio(&f, &b).unwrap().ratio + 1e-6;
        // Generous comparability factor.
        let cfac = 1.2;
        let rep = check_inversion(&f, &b, &e, cfac, c1).unwrap();
        assert!(rep.premises_failed.is_none(), "{rep:?}");
        assert!(rep.holds, "{rep:?}");
        // Conclusion constant is alpha c^2 c1.
        let alpha = rep.constants[2];
        assert!((rep.constants[3] - alpha * cfac * cfac * c1).abs() < 1e-12);
    }

    #[test]
    fn inversion_detects_premise_violation() {
        // Against the diagonal norm max(|v1|, 2|v2|, 4|v3|) the second basis
        // mixes coordinates so that (after the ascending re-sort)
        // <e_1, b_3> = 0 while <b_1, e_3> != 0.
        let f = NormSpec::new(
            ScalarField::Real,
            3,
            vec![
                r(&[1.0, 0.0, 0.0]),
                r(&[0.0, 2.0, 0.0]),
                r(&[0.0, 0.0, 4.0]),
            ],
        )
        .unwrap();
        let b = ExtremalBasis::external(&f, vec![e(3, 0), e(3, 1), e(3, 2)]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mixed = ExtremalBasis::external(
            &f,
            vec![r(&[0.0, 1.0, 0.0]), r(&[s, 0.0, s]), r(&[s, 0.0, -s])],
        )
        .unwrap();
        let rep = check_inversion(&f, &b, &mixed, 2.0, 3.1).unwrap();
        assert!(rep.premises_failed.is_some(), "{rep:?}");
        assert!(!rep.holds);
    }

    #[test]
    fn grid_oracle_cross_checks_vertex_enum() {
        // The max-side ratio of the maximal basis equals the grid value of
        // the weighted sum over the sphere divided by f, spot-checked by a
        // coarse angular sweep.
        let f = linf2();
        let b = maximal_basis(&f).unwrap();
        let rep = upper_ratio(&f, &b).unwrap();
        let mut best = 0.0f64;
        let steps = 20_000;
        for k in 0..steps {
            let th = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            let v = r(&[th.cos(), th.sin()]);
            let ratio = ratio_at(&f, &b, &v).unwrap();
            best = best.max(ratio);
        }
        assert!(
            (rep.ratio - best).abs() < 1e-7,
            "enum {} sweep {best}",
            rep.ratio
        );
        let _ = sphere::OptMode::Max;
    }

    #[test]
    fn verify_construction_pipeline() {
        let out = crate::construct::build_min_construction(2, 0.1).unwrap();
        let rep =
            crate::construct::verify_construction(&out, crate::construct::ConstructionMode::Min)
                .unwrap();
        assert!(rep.basis_equivalent);
        assert!((rep.measured_ratio - 3.2 / 1.4).abs() < 1e-9);
        let b = minimal_basis(&out.norm).unwrap();
        assert!(are_equivalent(&b, &out.expected_basis).equivalent);
    }
}
