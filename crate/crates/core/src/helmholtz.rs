//! Leray/Helmholtz projection onto divergence-free fields, the negative `V'_s` norms,
//! and pressure recovery.

use num_complex::Complex64;

use crate::error::{Result, TorusError};
use crate::spectral::{
    base_wavenumber, check_shapes, derivative_vector, l2_norm_exact, laplace_eigenvalue,
    nonlinear_d, ScalarField, VectorField, WaveVector,
};

/// `u = Pu + ∇p` with `Pu` divergence free and `p` of zero mean.
#[derive(Clone, Debug)]
pub struct ProjectionDecomposition {
    pub solenoidal: VectorField,
    pub gradient_part: VectorField,
    pub potential: ScalarField,
}

fn dot(k: WaveVector, a: &[Complex64; 3]) -> Complex64 {
    a[0] * k.0[0] as f64 + a[1] * k.0[1] as f64 + a[2] * k.0[2] as f64
}

/// `Pu`: keeps the mean and applies `I - k kᵀ/(k,k)` to every other mode.
pub fn leray_project(u: &VectorField) -> VectorField {
    u.map_amplitudes(|k, a| {
        if k.is_zero() {
            return a;
        }
        let kk = k.shell() as f64;
        let s = dot(k, &a) / kk;
        [a[0] - s * k.0[0] as f64, a[1] - s * k.0[1] as f64, a[2] - s * k.0[2] as f64]
    })
}

/// `(I - P)u`.
pub fn gradient_part(u: &VectorField) -> VectorField {
    u - &leray_project(u)
}

/// Zero-mean potential `p` whose gradient is the gradient part of `g`.
fn potential_of(g: &VectorField) -> ScalarField {
    let ell = g.ell();
    let kappa = base_wavenumber(ell);
    let mut p = ScalarField::zeros(ell, g.cutoff());
    let comps = g.components();
    let modes: Vec<_> = comps[0].modes().map(|(k, _)| k).filter(|k| k.is_canonical()).collect();
    for k in modes {
        let a = g.coeff(k);
        // ∇ ↦ iκk, so p̂ = (k·ĝ) / (iκ (k,k))
        let c = dot(k, &a) / (Complex64::new(0.0, kappa) * k.shell() as f64);
        p.set_coeff(k, c).expect("mode within cutoff");
    }
    p
}

pub fn decompose(u: &VectorField) -> ProjectionDecomposition {
    let solenoidal = leray_project(u);
    let gradient_part = u - &solenoidal;
    let potential = potential_of(&gradient_part);
    ProjectionDecomposition { solenoidal, gradient_part, potential }
}

/// `‖∂_j(Pu) - P(∂_j u)‖_{L²}`, zero up to rounding since both are Fourier multipliers.
pub fn commutes_with_derivative_check(u: &VectorField, axis: usize) -> Result<f64> {
    if axis > 2 {
        return Err(TorusError::InvalidInput(format!("axis {axis} out of range")));
    }
    let a = derivative_vector(&leray_project(u), axis);
    let b = leray_project(&derivative_vector(u, axis));
    Ok(l2_norm_exact(&(&a - &b)))
}

/// Zero-mean pressure with `∇p = (I - P)(f - 𝐃u)`.
pub fn recover_pressure(f: &VectorField, u: &VectorField) -> Result<ScalarField> {
    check_shapes(f.ell(), f.cutoff(), u.ell(), u.cutoff())?;
    let mut g = f.clone();
    g -= &nonlinear_d(u)?;
    Ok(potential_of(&gradient_part(&g)))
}

/// Negative norm `‖f‖_{V'_s} = (ℓ³ Σ_k (1 + (k,k)(2π/ℓ)²)^{-s} |ĉ_k(Pf)|²)^{1/2}`.
///
/// For `s = 1` this equals `sup |(f,v)| / ‖v‖_{H¹}` over divergence-free `v`. For
/// larger `s` it is an equivalent norm on the dual of `V_s`.
pub fn dual_norm(f: &VectorField, s: u32) -> Result<f64> {
    if s < 1 {
        return Err(TorusError::InvalidExponent(format!("dual norm needs s >= 1, got {s}")));
    }
    let ell = f.ell();
    let pf = leray_project(f);
    let e = pf.weighted_energy(|k| (1.0 + laplace_eigenvalue(k, ell)).powi(-(s as i32)));
    Ok((ell.powi(3) * e).sqrt())
}

/// Divergence-free `v` attaining the supremum in the `V'_1` norm of `f`.
pub fn dual_supremizer(f: &VectorField) -> VectorField {
    let ell = f.ell();
    leray_project(f).map_real_modes(|k| 1.0 / (1.0 + laplace_eigenvalue(k, ell)))
}
