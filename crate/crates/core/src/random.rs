//! Seeded random norm generation for experiments and tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{ScalarField, Vector};
use crate::norm::NormSpec;

/// Name of the generator recorded in output artifacts; the (name, seed) pair
/// is what makes a run reproducible.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Draw a support set of `supports` standard-normal vectors and keep drawing
/// until the result is a genuine norm (full-rank support).
pub fn random_norm(
    field: ScalarField,
    dim: usize,
    supports: usize,
    rng: &mut ChaCha8Rng,
) -> Result<NormSpec> {
    loop {
        let support: Vec<Vector> = (0..supports)
            .map(|_| random_vector(field, dim, rng))
            .collect();
        if support.iter().any(Vector::is_zero) {
            continue;
        }
        let spec = NormSpec::new(field, dim, support)?;
        if spec.is_norm().is_norm {
            return Ok(spec);
        }
    }
}

/// A standard-normal vector (independent re/im parts in the complex case).
pub fn random_vector(field: ScalarField, dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    match field {
        ScalarField::Real => {
            let coords: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            Vector::real(&coords).expect("normal samples are finite")
        }
        ScalarField::Complex => {
            let coords: Vec<(f64, f64)> = (0..dim)
                .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            Vector::complex(&coords).expect("normal samples are finite")
        }
    }
}

/// A uniformly random unit vector (normalized Gaussian).
pub fn random_unit_vector(field: ScalarField, dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let v = random_vector(field, dim, rng);
        if v.norm2() > 1e-8 {
            return v.normalize().expect("checked nonzero");
        }
    }
}
