//! Differential operators as Fourier multipliers, and exact coefficient-space norms.

use num_complex::Complex64;

use super::field::{check_ell, ScalarField, SpectralField, VectorField};
use super::wave::WaveVector;
use crate::error::{Result, TorusError};

/// `2π/ℓ`, the wavenumber of the fundamental mode.
pub fn base_wavenumber(ell: f64) -> f64 {
    2.0 * std::f64::consts::PI / ell
}

/// Eigenvalue `(k,k)(2π/ℓ)²` of `-Δ` on the mode `k`.
pub fn laplace_eigenvalue(k: WaveVector, ell: f64) -> f64 {
    let kappa = base_wavenumber(ell);
    k.shell() as f64 * kappa * kappa
}

fn i_kappa(k: WaveVector, ell: f64, axis: usize) -> Complex64 {
    Complex64::new(0.0, base_wavenumber(ell) * k.0[axis] as f64)
}

/// `∂_axis u`.
pub fn derivative(u: &ScalarField, axis: usize) -> ScalarField {
    let ell = u.ell();
    u.map_modes(|k| i_kappa(k, ell, axis))
}

pub fn derivative_vector(u: &VectorField, axis: usize) -> VectorField {
    let ell = u.ell();
    u.map_modes(|k| i_kappa(k, ell, axis))
}

pub fn grad(p: &ScalarField) -> VectorField {
    VectorField::from_components([derivative(p, 0), derivative(p, 1), derivative(p, 2)])
        .expect("derivatives share shape")
}

pub fn div(u: &VectorField) -> ScalarField {
    let mut out = derivative(u.component(0), 0);
    out.axpy(1.0, &derivative(u.component(1), 1));
    out.axpy(1.0, &derivative(u.component(2), 2));
    out
}

pub fn rot(u: &VectorField) -> VectorField {
    let ell = u.ell();
    u.map_amplitudes(|k, a| {
        let d = [i_kappa(k, ell, 0), i_kappa(k, ell, 1), i_kappa(k, ell, 2)];
        [d[1] * a[2] - d[2] * a[1], d[2] * a[0] - d[0] * a[2], d[0] * a[1] - d[1] * a[0]]
    })
}

pub fn laplacian<F: SpectralField>(u: &F) -> F {
    let ell = u.ell();
    u.map_real(&mut |k| -laplace_eigenvalue(k, ell))
}

/// `(-Δ)^r` with multiplier `((k,k)(2π/ℓ)²)^r` on `k ≠ 0`.
///
/// The zero mode is kept for `r = 0` and dropped otherwise. Negative powers are only
/// defined on zero-mean fields.
pub fn neg_laplacian_pow<F: SpectralField>(u: &F, r: f64) -> Result<F> {
    if r.is_nan() {
        return Err(TorusError::InvalidExponent("power is NaN".into()));
    }
    if r < 0.0 && !u.zero_mean() {
        return Err(TorusError::NotInvertibleOnConstants);
    }
    let ell = u.ell();
    Ok(u.map_real(&mut |k| {
        if k.is_zero() {
            if r == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            laplace_eigenvalue(k, ell).powf(r)
        }
    }))
}

/// Coefficient Sobolev norm `‖u‖_s = (Σ_k (1 + (k,k))^s |c_k|²)^{1/2}`.
pub fn sobolev_norm<F: SpectralField>(u: &F, s: f64) -> f64 {
    u.weighted_energy_with(&mut |k| (1.0 + k.shell() as f64).powf(s)).sqrt()
}

/// Exact `L²(Q)` norm, `ℓ³ Σ |c_k|²` under the square root.
pub fn l2_norm_exact<F: SpectralField>(u: &F) -> f64 {
    (u.ell().powi(3) * u.weighted_energy_with(&mut |_| 1.0)).sqrt()
}

/// `H^s(Q)` norm `(ℓ³ Σ_k (1 + (k,k)(2π/ℓ)²)^s |c_k|²)^{1/2}`; for integer `s` this is
/// the norm built from `L²` norms of all derivatives.
pub fn hs_norm<F: SpectralField>(u: &F, s: f64) -> f64 {
    let ell = u.ell();
    (ell.powi(3) * u.weighted_energy_with(&mut |k| (1.0 + laplace_eigenvalue(k, ell)).powf(s)))
        .sqrt()
}

/// `‖∇^j u‖_{L²}`, the square root of `Σ ‖∂_{i₁}…∂_{i_j} u‖²` over all ordered index tuples.
///
/// Equals `‖(-Δ)^{j/2} u‖_{L²}` for `j >= 1` and the full `L²` norm for `j = 0`.
pub fn gradient_norm<F: SpectralField>(u: &F, j: u32) -> f64 {
    let ell = u.ell();
    (ell.powi(3) * u.weighted_energy_with(&mut |k| laplace_eigenvalue(k, ell).powi(j as i32)))
        .sqrt()
}

pub fn inner_l2_scalar(u: &ScalarField, v: &ScalarField) -> Result<f64> {
    check_ell(u.ell(), v.ell())?;
    let (small, large) = if u.cutoff() <= v.cutoff() { (u, v) } else { (v, u) };
    let s: f64 = small.modes().map(|(k, c)| (c * large.coeff(k).conj()).re).sum();
    Ok(u.ell().powi(3) * s)
}

/// `(u, v)_{L²(Q)} = ℓ³ Σ_k c_k(u) · conj(c_k(v))`.
pub fn inner_l2(u: &VectorField, v: &VectorField) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..3 {
        s += inner_l2_scalar(u.component(i), v.component(i))?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sobolev_single_mode() {
        let u = ScalarField::from_modes(1.0, 2, [(WaveVector::new(1, 0, 0), c(0.5, 0.0))]).unwrap();
        assert!((sobolev_norm(&u, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sobolev_norm(&ScalarField::zeros(1.0, 4), 3.0), 0.0);
    }

    #[test]
    fn l2_of_constant_and_sine() {
        let ell = 1.3;
        let u = ScalarField::constant(ell, 2, -2.0);
        assert!((l2_norm_exact(&u) - 2.0 * ell.powf(1.5)).abs() < 1e-14);
        let s = ScalarField::from_modes(ell, 1, [(WaveVector::new(0, 1, 0), c(0.0, -0.5))]).unwrap();
        assert!((l2_norm_exact(&s) - ell.powf(1.5) / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inner_rejects_mismatched_period() {
        let a = VectorField::zeros(1.0, 2);
        let b = VectorField::zeros(2.0, 2);
        assert!(matches!(inner_l2(&a, &b), Err(TorusError::IncompatibleDomains { .. })));
    }

    #[test]
    fn laplacian_multiplier() {
        let ell = 3.0;
        let k = WaveVector::new(1, -2, 1);
        let u = ScalarField::from_modes(ell, 6, [(k, c(1.0, 0.5))]).unwrap();
        let lu = laplacian(&u);
        let m = -(6.0) * (2.0 * PI / ell).powi(2);
        assert!((lu.coeff(k) - c(1.0, 0.5) * m).norm() < 1e-13);
    }

    #[test]
    fn grad_of_constant_vanishes() {
        assert!(grad(&ScalarField::constant(1.0, 4, 3.0)).is_zero());
    }

    #[test]
    fn neg_laplacian_powers() {
        let u = ScalarField::from_modes(2.0 * PI, 2, [(WaveVector::new(1, 1, 0), c(0.3, 0.1))])
            .unwrap();
        assert_eq!(neg_laplacian_pow(&u, 0.0).unwrap(), u);
        let v = neg_laplacian_pow(&u, 1.0).unwrap();
        assert!((v.coeff(WaveVector::new(1, 1, 0)) - c(0.6, 0.2)).norm() < 1e-14);
        let w = ScalarField::constant(1.0, 2, 1.0);
        assert!(matches!(neg_laplacian_pow(&w, -0.5), Err(TorusError::NotInvertibleOnConstants)));
        assert!(neg_laplacian_pow(&w, 1.0).unwrap().is_zero());
    }
}
