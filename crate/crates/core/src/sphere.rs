//! Optimization of a finitely generated norm over the unit sphere of a
//! subspace.
//!
//! The maximum is analytic: `max { f(v) : v in S, v in s } = max_u |P_s u|`
//! with the optimum along the projection of the winning support vector. The
//! minimum has no such formula; it is attacked by multi-start projected
//! subgradient descent followed by an active-set polish that solves the
//! equalized-constraint stationarity system on growing working sets. A
//! brute-force angular grid doubles as an independent oracle at low
//! dimension.
//!
//! All searches run in subspace coordinates, and complex problems are
//! parametrized over the reals (a complex coordinate contributes a (re, im)
//! pair), so one real code path serves both fields.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, ScalarField, Subspace, Vector};
use crate::norm::NormSpec;
use crate::solve::solve_square;
use crate::tol;

/// How a sphere optimum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptMethod {
    Analytic,
    Multistart,
    Grid,
}

impl OptMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptMethod::Analytic => "analytic",
            OptMethod::Multistart => "multistart",
            OptMethod::Grid => "grid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptMode {
    Min,
    Max,
}

/// Result of a sphere optimization. `seed` is the multistart seed (zero for
/// the deterministic analytic and grid methods).
#[derive(Clone, Debug)]
pub struct SphereOptResult {
    pub argopt: Vector,
    pub value: f64,
    pub method: OptMethod,
    pub starts_used: usize,
    pub converged: bool,
    pub seed: u64,
}

/// Multistart seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1_234_567_891;

const SUBGRADIENT_ITERS: usize = 500;
const RANDOM_STARTS: usize = 64;
const POLISH_ROUNDS: usize = 30;

fn check_subspace(f: &NormSpec, s: &Subspace) -> Result<()> {
    if s.field() != f.field() {
        return Err(Error::FieldMismatch(f.field(), s.field()));
    }
    if s.ambient_dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: s.ambient_dim(),
        });
    }
    if s.is_trivial() {
        return Err(Error::TrivialSubspace);
    }
    Ok(())
}

/// Analytic maximum of `f` over the unit sphere of `s`: for each support
/// vector the best value along its projection is the projection length, and
/// the overall best is the largest one (lowest support index on ties).
pub fn max_on_sphere(f: &NormSpec, s: &Subspace) -> Result<SphereOptResult> {
    check_subspace(f, s)?;
    let mut best: Option<(usize, f64, Vector)> = None;
    for (i, u) in f.support().iter().enumerate() {
        let p = linalg::project(u, s).expect("checked compatible");
        let len = p.norm2();
        if best.as_ref().is_none_or(|(_, b, _)| len > *b) {
            best = Some((i, len, p));
        }
    }
    let (_, len, p) = best.expect("support is nonempty");
    if len == 0.0 {
        return Err(Error::VanishingOnSubspace);
    }
    let argopt = p.normalize().expect("nonzero").canonicalized();
    let value = f.evaluate(&argopt)?;
    Ok(SphereOptResult {
        argopt,
        value,
        method: OptMethod::Analytic,
        starts_used: f.support().len(),
        converged: true,
        seed: 0,
    })
}

/// Minimum of `f` over the unit sphere of `s` with the default seed.
pub fn min_on_sphere(f: &NormSpec, s: &Subspace) -> Result<SphereOptResult> {
    min_on_sphere_seeded(f, s, DEFAULT_SEED)
}

/// Multi-start projected subgradient descent plus active-set polish. Starts:
/// every normalized projected support vector, their normalized pairwise
/// differences, and 64 seeded pseudorandom unit vectors. `converged` means
/// the best two starts agree to [`tol::CONVERGENCE`].
pub fn min_on_sphere_seeded(f: &NormSpec, s: &Subspace, seed: u64) -> Result<SphereOptResult> {
    check_subspace(f, s)?;
    let problem = SphereProblem::build(f, s)?;

    // One-dimensional subspaces need no search: the sphere is a sign (real)
    // or phase (complex) orbit on which f is constant.
    if s.dim() == 1 {
        let argopt = s.basis()[0].canonicalized();
        let value = f.evaluate(&argopt)?;
        return Ok(SphereOptResult {
            argopt,
            value,
            method: OptMethod::Multistart,
            starts_used: 1,
            converged: true,
            seed,
        });
    }

    let starts = problem.starts(seed);
    let starts_used = starts.len();
    let outcomes: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|x0| problem.minimize_from(x0))
        .collect();

    let best_val = outcomes
        .iter()
        .map(|(v, _)| *v)
        .fold(f64::INFINITY, f64::min);
    if !best_val.is_finite() {
        return Err(Error::param("minimizer", "non-finite optimum"));
    }

    // Deterministic tie-break: lexicographically smallest canonicalized
    // ambient vector among the starts that tie with the best value.
    let tie = tol::scaled(1e-12, best_val);
    let mut argopt: Option<Vector> = None;
    for (v, x) in &outcomes {
        if *v <= best_val + tie {
            let cand = problem.to_ambient(s, x).canonicalized();
            let better = argopt
                .as_ref()
                .is_none_or(|cur| cand.lex_cmp(cur) == std::cmp::Ordering::Less);
            if better {
                argopt = Some(cand);
            }
        }
    }
    let argopt = argopt.expect("at least one start");

    let mut vals: Vec<f64> = outcomes.iter().map(|(v, _)| *v).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let converged = vals.len() < 2 || vals[1] - vals[0] <= tol::scaled(tol::CONVERGENCE, vals[0]);

    let value = f.evaluate(&argopt)?;
    Ok(SphereOptResult {
        argopt,
        value,
        method: OptMethod::Multistart,
        starts_used,
        converged,
        seed,
    })
}

/// Exhaustive angular grid over the sphere of `s` (resolution samples per
/// angle axis) followed by a derivative-free pattern-search polish. Only
/// spheres of real dimension <= 3 are allowed, i.e. real subspace dimension
/// <= 4 (complex <= 2).
pub fn grid_oracle(
    f: &NormSpec,
    s: &Subspace,
    mode: OptMode,
    resolution: usize,
) -> Result<SphereOptResult> {
    check_subspace(f, s)?;
    let problem = SphereProblem::build(f, s)?;
    let m = problem.rd - 1;
    if m > 3 {
        return Err(Error::DimensionTooLarge(m));
    }
    if resolution < 2 && m > 0 {
        return Err(Error::param(
            "resolution",
            "need at least 2 samples per axis",
        ));
    }

    let better = |a: f64, b: f64| match mode {
        OptMode::Min => a < b,
        OptMode::Max => a > b,
    };

    let mut best_theta = vec![0.0f64; m];
    let mut best_val = problem.eval(&angles_to_point(&best_theta)).1;
    let mut evaluated = 1usize;

    if m > 0 {
        let mut theta = vec![0.0f64; m];
        let mut idx = vec![0usize; m];
        loop {
            for i in 0..m {
                let span = if i == m - 1 {
                    2.0 * std::f64::consts::PI * idx[i] as f64 / resolution as f64
                } else {
                    std::f64::consts::PI * idx[i] as f64 / (resolution - 1) as f64
                };
                theta[i] = span;
            }
            let (_, v) = problem.eval(&angles_to_point(&theta));
            evaluated += 1;
            if better(v, best_val) {
                best_val = v;
                best_theta.copy_from_slice(&theta);
            }
            // Odometer increment over the m-dimensional grid.
            let mut carry = 0;
            while carry < m {
                idx[carry] += 1;
                if idx[carry] < resolution {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
            if carry == m {
                break;
            }
        }

        // Pattern search on the angles down to 1e-12.
        let mut h = std::f64::consts::PI / resolution as f64;
        let mut rounds = 0;
        while h > 1e-12 && rounds < 400 {
            rounds += 1;
            let mut moved = false;
            for axis in 0..m {
                for dir in [-1.0, 1.0] {
                    let mut cand = best_theta.clone();
                    cand[axis] += dir * h;
                    let (_, v) = problem.eval(&angles_to_point(&cand));
                    evaluated += 1;
                    if better(v, best_val) {
                        best_val = v;
                        best_theta = cand;
                        moved = true;
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
    }

    let argopt = problem
        .to_ambient(s, &angles_to_point(&best_theta))
        .canonicalized();
    let value = f.evaluate(&argopt)?;
    Ok(SphereOptResult {
        argopt,
        value,
        method: OptMethod::Grid,
        starts_used: evaluated,
        converged: true,
        seed: 0,
    })
}

/// Unit point of `S^m` in hyperspherical coordinates (m angles).
fn angles_to_point(theta: &[f64]) -> Vec<f64> {
    let m = theta.len();
    let mut x = vec![0.0f64; m + 1];
    let mut sin_prod = 1.0f64;
    for i in 0..m {
        x[i] = sin_prod * theta[i].cos();
        sin_prod *= theta[i].sin();
    }
    x[m] = sin_prod;
    x
}

/// The coordinate form of `f` restricted to a subspace, over the real
/// parametrization of the subspace sphere.
struct SphereProblem {
    /// Real parametrization dimension: dim(s) for real, 2 dim(s) for complex.
    rd: usize,
    complex: bool,
    /// Real-part rows: `re[a] . x = Re<x, w_a>` in the parametrization.
    re: Vec<Vec<f64>>,
    /// Imaginary-part rows (complex only): `im[a] . x = Im<x, w_a>`.
    im: Vec<Vec<f64>>,
}

impl SphereProblem {
    fn build(f: &NormSpec, s: &Subspace) -> Result<Self> {
        let complex = f.field() == ScalarField::Complex;
        let d = s.dim();
        let rd = if complex { 2 * d } else { d };
        let mut re = Vec::new();
        let mut im = Vec::new();
        let mut max_len = 0.0f64;
        for u in f.support() {
            let p = linalg::project(u, s).expect("checked compatible");
            max_len = max_len.max(p.norm2());
            if p.is_zero() {
                continue;
            }
            let w = s.coords_of(&p);
            // <x, w> = sum_j x_j conj(w_j); with x_j = a_j + i b_j the real
            // and imaginary parts are linear in (a_j, b_j).
            let mut row_re = vec![0.0; rd];
            let mut row_im = vec![0.0; rd];
            for (j, wj) in w.iter().enumerate() {
                if complex {
                    row_re[2 * j] = wj.re;
                    row_re[2 * j + 1] = wj.im;
                    row_im[2 * j] = -wj.im;
                    row_im[2 * j + 1] = wj.re;
                } else {
                    row_re[j] = wj.re;
                }
            }
            re.push(row_re);
            if complex {
                im.push(row_im);
            }
        }
        if max_len == 0.0 || re.is_empty() {
            return Err(Error::VanishingOnSubspace);
        }
        Ok(SphereProblem {
            rd,
            complex,
            re,
            im,
        })
    }

    fn eval(&self, x: &[f64]) -> (usize, f64) {
        let mut best = 0usize;
        let mut best_val = -1.0f64;
        for a in 0..self.re.len() {
            let p = dot(x, &self.re[a]);
            let m = if self.complex {
                let q = dot(x, &self.im[a]);
                (p * p + q * q).sqrt()
            } else {
                p.abs()
            };
            if m > best_val {
                best_val = m;
                best = a;
            }
        }
        (best, best_val)
    }

    /// Phase-aligned linearization row of constraint `a` at `x`: the gradient
    /// of `|<x, w_a>|`, satisfying `z . x = |<x, w_a>|`.
    fn z_row(&self, x: &[f64], a: usize) -> Vec<f64> {
        let p = dot(x, &self.re[a]);
        if !self.complex {
            let s = if p < 0.0 { -1.0 } else { 1.0 };
            return self.re[a].iter().map(|&v| s * v).collect();
        }
        let q = dot(x, &self.im[a]);
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

    fn starts(&self, seed: u64) -> Vec<Vec<f64>> {
        let mut starts = Vec::new();
        for row in &self.re {
            if let Some(u) = unit(row) {
                starts.push(u);
            }
        }
        let n = self.re.len();
        for a in 0..n {
            for b in a + 1..n {
                let diff: Vec<f64> = self.re[a]
                    .iter()
                    .zip(self.re[b].iter())
                    .map(|(x, y)| x - y)
                    .collect();
                if let Some(u) = unit(&diff) {
                    starts.push(u);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_STARTS {
            loop {
                let v: Vec<f64> = (0..self.rd)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect();
                if let Some(u) = unit(&v) {
                    starts.push(u);
                    break;
                }
            }
        }
        starts
    }

    /// Subgradient descent with a 1/k schedule, then the active-set polish on
    /// both the best and the final iterate. Returns the best value seen and
    /// its point.
    fn minimize_from(&self, x0: &[f64]) -> (f64, Vec<f64>) {
        let mut x = x0.to_vec();
        let (_, mut val) = self.eval(&x);
        let mut best = (val, x.clone());
        for k in 1..=SUBGRADIENT_ITERS {
            let (idx, v) = self.eval(&x);
            val = v;
            if val < best.0 {
                best = (val, x.clone());
            }
            let z = self.z_row(&x, idx);
            // Project the subgradient onto the tangent space of the sphere.
            let radial = dot(&z, &x);
            let mut t: Vec<f64> = z
                .iter()
                .zip(x.iter())
                .map(|(&g, &xi)| g - radial * xi)
                .collect();
            let tn = norm(&t);
            if tn <= 1e-15 * norm(&z).max(1.0) {
                break;
            }
            let step = std::f64::consts::FRAC_PI_2 / k as f64;
            for (xi, ti) in x.iter_mut().zip(t.iter_mut()) {
                *xi -= step * *ti / tn;
            }
            if let Some(u) = unit(&x) {
                x = u;
            } else {
                break;
            }
        }
        let (_, v_final) = self.eval(&x);
        if v_final < best.0 {
            best = (v_final, x.clone());
        }
        let polished_best = self.polish(&best.1, best.0);
        let polished_final = self.polish(&x, v_final);
        let mut out = best;
        for cand in [polished_best, polished_final] {
            if cand.0 < out.0 {
                out = cand;
            }
        }
        out
    }

    /// Active-set polish. Working sets grow from the single most-active
    /// constraint up to the sphere's real parametrization dimension; for each
    /// set the equalized-constraint stationarity system `z_a . x = t` is
    /// solved (square when the set is full-dimensional, else through the Gram
    /// system, whose solution is the minimum-norm one in the span of the
    /// rows). Candidates only count if they actually lower the value, so an
    /// ill-conditioned solve can never hurt. [`tol::ACTIVITY`] decides which
    /// constraints count as active at the accepted point.
    fn polish(&self, x0: &[f64], v0: f64) -> (f64, Vec<f64>) {
        let mut x = x0.to_vec();
        let mut val = v0;
        let k_max = self.rd.min(self.re.len());
        for _ in 0..POLISH_ROUNDS {
            // Constraint values, sorted descending.
            let mut vals: Vec<(usize, f64)> = (0..self.re.len())
                .map(|a| {
                    let p = dot(&x, &self.re[a]);
                    let m = if self.complex {
                        let q = dot(&x, &self.im[a]);
                        (p * p + q * q).sqrt()
                    } else {
                        p.abs()
                    };
                    (a, m)
                })
                .collect();
            vals.sort_by(|l, r| r.1.partial_cmp(&l.1).expect("finite").then(l.0.cmp(&r.0)));

            let mut improved: Option<(f64, Vec<f64>)> = None;
            let consider = |cand: Option<Vec<f64>>, improved: &mut Option<(f64, Vec<f64>)>| {
                if let Some(c) = cand {
                    if let Some(u) = unit(&c) {
                        let (_, v) = self.eval(&u);
                        if v.is_finite() && v < improved.as_ref().map_or(val, |(bv, _)| *bv) {
                            *improved = Some((v, u));
                        }
                    }
                }
            };

            // Deflation candidate: drop the top constraint direction.
            {
                let z = self.z_row(&x, vals[0].0);
                if let Some(zu) = unit(&z) {
                    let c = dot(&x, &zu);
                    let cand: Vec<f64> = x
                        .iter()
                        .zip(zu.iter())
                        .map(|(&xi, &zi)| xi - c * zi)
                        .collect();
                    consider(Some(cand), &mut improved);
                }
            }

            for k in 1..=k_max {
                let rows: Vec<Vec<f64>> =
                    vals[..k].iter().map(|&(a, _)| self.z_row(&x, a)).collect();
                let cand = if k == self.rd {
                    let mut a = Vec::with_capacity(k * k);
                    for row in &rows {
                        a.extend_from_slice(row);
                    }
                    solve_square(a, vec![1.0; k], k)
                } else {
                    let mut g = Vec::with_capacity(k * k);
                    for ra in &rows {
                        for rb in &rows {
                            g.push(dot(ra, rb));
                        }
                    }
                    solve_square(g, vec![1.0; k], k).map(|lambda| {
                        let mut out = vec![0.0; self.rd];
                        for (l, row) in lambda.iter().zip(rows.iter()) {
                            for (o, r) in out.iter_mut().zip(row.iter()) {
                                *o += l * r;
                            }
                        }
                        out
                    })
                };
                consider(cand, &mut improved);
            }

            match improved {
                Some((v, u)) => {
                    val = v;
                    x = u;
                }
                None => break,
            }
        }
        (val, x)
    }

    /// Map a real-parametrized point back to the ambient space.
    fn to_ambient(&self, s: &Subspace, x: &[f64]) -> Vector {
        let coords: Vec<Complex64> = if self.complex {
            x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
        } else {
            x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
        };
        s.from_coords(&coords)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
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

/// The active support indices at `v` under the relative activity threshold.
pub fn active_support(f: &NormSpec, v: &Vector) -> Vec<usize> {
    let value = f.eval_unchecked(v);
    let cut = value * (1.0 - tol::ACTIVITY);
    f.support()
        .iter()
        .enumerate()
        .filter(|(_, u)| v.inner_unchecked(u).norm() >= cut)
        .map(|(i, _)| i)
        .collect()
}
