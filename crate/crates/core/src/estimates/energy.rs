use serde::Serialize;

use crate::error::{Result, TorusError};
use crate::galerkin::{cumulative_trapezoid, FieldTrajectory, Forcing};
use crate::helmholtz::dual_norm;
use crate::spectral::{gradient_norm, l2_norm_exact, lp_norm, min_grid, VectorField};

/// Both sides of the basic energy estimate for one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyCertificate {
    /// `‖u‖²_{0,μ,T} = max_t ‖u‖²_{L²} + μ ∫ ‖∇u‖²_{L²}`.
    pub lhs_squared: f64,
    /// `‖(f,u₀)‖²_{0,μ,T} = ‖u₀‖² + (2/μ) ∫ ‖f‖²_{V'_1} + (∫ ‖f‖_{V'_1})²`.
    pub rhs_squared: f64,
    /// `1 + 2√2 e^{W/μ} + (4/μ) W e^{2W/μ}` with `W = ∫ ‖w‖²_{L^∞}`.
    pub factor: f64,
    /// `lhs_squared / rhs_squared`, compared against 1 by the strict reading.
    pub ratio: f64,
    pub pass: bool,
    /// `lhs_squared <= rhs_squared`.
    pub strict_pass: bool,
}

/// `∫_0^T ‖w(t)‖²_{L^∞}` by the trapezoid rule, sup norms on an `n³` grid.
pub fn drift_integral(w: &FieldTrajectory, n: usize) -> Result<f64> {
    let sq = w.fields.iter().map(|f| Ok(lp_norm(f, f64::INFINITY, n)?.powi(2))).collect::<Result<Vec<_>>>()?;
    Ok(*cumulative_trapezoid(&w.times, &sq).last().unwrap())
}

pub fn certificate_factor(mu: f64, drift: f64) -> f64 {
    1.0 + 2.0 * 2f64.sqrt() * (drift / mu).exp() + 4.0 / mu * drift * (2.0 * drift / mu).exp()
}

/// Evaluates the energy estimate on `traj` with data `(f, u0)`; `w` is the drift of the
/// linearised problem (none for the nonlinear one, which gives the factor `1 + 2√2`).
///
/// Time maxima are taken over the samples, time integrals by the trapezoid rule.
pub fn energy_certificate(
    traj: &FieldTrajectory,
    f: &dyn Forcing,
    u0: &VectorField,
    mu: f64,
    w: Option<&FieldTrajectory>,
) -> Result<EnergyCertificate> {
    if !(mu > 0.0) {
        return Err(TorusError::InvalidInput(format!("viscosity must be positive, got {mu}")));
    }
    if traj.fields.iter().any(|u| !u.is_finite()) {
        return Err(TorusError::MissingDerivativeData("trajectory holds non-finite samples".into()));
    }
    let sup = traj.fields.iter().map(|u| l2_norm_exact(u).powi(2)).fold(0.0, f64::max);
    let grad_sq: Vec<f64> = traj.fields.iter().map(|u| gradient_norm(u, 1).powi(2)).collect();
    let lhs_squared = sup + mu * cumulative_trapezoid(&traj.times, &grad_sq).last().unwrap();

    let duals = traj.times.iter().map(|&t| dual_norm(&f.eval(t)?, 1)).collect::<Result<Vec<_>>>()?;
    let sq: Vec<f64> = duals.iter().map(|d| d * d).collect();
    let l2 = *cumulative_trapezoid(&traj.times, &sq).last().unwrap();
    let l1 = *cumulative_trapezoid(&traj.times, &duals).last().unwrap();
    let rhs_squared = l2_norm_exact(u0).powi(2) + 2.0 / mu * l2 + l1 * l1;

    let drift = match w {
        Some(w) => drift_integral(w, 2 * min_grid(w.cutoff()))?,
        None => 0.0,
    };
    let factor = certificate_factor(mu, drift);
    let ratio = if rhs_squared > 0.0 {
        lhs_squared / rhs_squared
    } else if lhs_squared == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(EnergyCertificate {
        lhs_squared,
        rhs_squared,
        factor,
        ratio,
        pass: lhs_squared <= factor * rhs_squared,
        strict_pass: lhs_squared <= rhs_squared,
    })
}

/// `‖u‖_{L^p(I, L²)}` by the trapezoid rule; `p = ∞` is the sample maximum.
pub fn time_lp_of_l2(traj: &FieldTrajectory, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(TorusError::InvalidExponent(format!("time exponent must be >= 1, got {p}")));
    }
    let norms: Vec<f64> = traj.fields.iter().map(l2_norm_exact).collect();
    if p.is_infinite() {
        return Ok(norms.iter().copied().fold(0.0, f64::max));
    }
    let pw: Vec<f64> = norms.iter().map(|x| x.powf(p)).collect();
    Ok(cumulative_trapezoid(&traj.times, &pw).last().unwrap().powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::ZeroForcing;

    #[test]
    fn zero_data_passes() {
        let z = VectorField::zeros(1.0, 2);
        let traj = FieldTrajectory::constant(z.clone(), 1.0);
        let c = energy_certificate(&traj, &ZeroForcing { ell: 1.0, cutoff: 2 }, &z, 0.3, None).unwrap();
        assert_eq!((c.lhs_squared, c.rhs_squared, c.ratio), (0.0, 0.0, 0.0));
        assert!(c.pass && c.strict_pass);
        assert!((c.factor - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn factor_grows_with_drift() {
        assert!(certificate_factor(0.1, 0.2) > certificate_factor(0.1, 0.1));
        assert!(certificate_factor(1.0, 0.1) < certificate_factor(0.5, 0.1));
    }
}
