//! Random band-limited fields for property checks and benchmarks.

use num_complex::Complex64;
use rand::Rng;

use crate::helmholtz::leray_project;
use crate::spectral::{ScalarField, VectorField};

/// Random real field with `|c_k| ~ (1 + (k,k))^{-decay/2}` and uniformly random phases.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, ell: f64, cutoff: u32, decay: f64) -> ScalarField {
    let mut u = ScalarField::zeros(ell, cutoff);
    let modes: Vec<_> = u.modes().map(|(k, _)| k).filter(|k| k.is_canonical() || k.is_zero()).collect();
    for k in modes {
        let w = (1.0 + k.shell() as f64).powf(-decay / 2.0);
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
        u.set_coeff(k, c).expect("mode within cutoff");
    }
    u
}

pub fn random_zero_mean<R: Rng + ?Sized>(rng: &mut R, ell: f64, cutoff: u32, decay: f64) -> ScalarField {
    let mut u = random_scalar(rng, ell, cutoff, decay);
    u.set_coeff(crate::spectral::WaveVector::ZERO, Complex64::new(0.0, 0.0)).unwrap();
    u
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, ell: f64, cutoff: u32, decay: f64) -> VectorField {
    VectorField::from_components([
        random_scalar(rng, ell, cutoff, decay),
        random_scalar(rng, ell, cutoff, decay),
        random_scalar(rng, ell, cutoff, decay),
    ])
    .expect("components share shape")
}

/// Random divergence-free field (Leray projection of [`random_vector`]).
pub fn random_solenoidal<R: Rng + ?Sized>(rng: &mut R, ell: f64, cutoff: u32, decay: f64) -> VectorField {
    leray_project(&random_vector(rng, ell, cutoff, decay))
}
