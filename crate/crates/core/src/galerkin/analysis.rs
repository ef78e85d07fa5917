use super::trajectory::{forcing_at, FieldTrajectory, Forcing};
use crate::error::{Result, TorusError};
use crate::helmholtz::recover_pressure;
use crate::spectral::{grad, gradient_norm, inner_l2, l2_norm_exact, laplacian, nonlinear_d, ScalarField};

/// Zero-mean pressure at every sample of `traj`.
pub fn recover_pressures(traj: &FieldTrajectory, f: &dyn Forcing) -> Result<Vec<ScalarField>> {
    traj.times
        .iter()
        .zip(&traj.fields)
        .map(|(&t, u)| recover_pressure(&forcing_at(f, t, traj.ell(), traj.cutoff())?, u))
        .collect()
}

/// `‖∂_t u - μΔu + 𝐃u + ∇p - f‖_{L²}` at every sample, with `f` truncated to the
/// trajectory cutoff. `∂_t u` is the stored rate or a finite difference.
pub fn residual(traj: &FieldTrajectory, pressure: &[ScalarField], f: &dyn Forcing, mu: f64) -> Result<Vec<f64>> {
    if pressure.len() != traj.len() {
        return Err(TorusError::InvalidInput(format!(
            "{} pressure samples for {} field samples",
            pressure.len(),
            traj.len()
        )));
    }
    let dt = traj.time_derivatives()?;
    let (ell, cutoff) = (traj.ell(), traj.cutoff());
    let mut out = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let u = &traj.fields[i];
        let p = pressure[i].with_cutoff(cutoff);
        let mut r = dt[i].clone();
        r.axpy(-mu, &laplacian(u));
        r += &nonlinear_d(u)?;
        r += &grad(&p);
        r -= &forcing_at(f, traj.times[i], ell, cutoff)?;
        out.push(l2_norm_exact(&r));
    }
    Ok(out)
}

/// Cumulative trapezoid integrals `∫_{t_0}^{t_i} g` of samples `g_i`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for i in 0..values.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Defect of the energy identity
/// `½‖u(t)‖² + μ∫_0^t ‖∇u‖² - ½‖u_0‖² - ∫_0^t (f,u)` at every sample, time integrals by
/// the trapezoid rule.
pub fn energy_defect(traj: &FieldTrajectory, f: &dyn Forcing, mu: f64) -> Result<Vec<f64>> {
    let (ell, cutoff) = (traj.ell(), traj.cutoff());
    let dissipation: Vec<f64> = traj.fields.iter().map(|u| gradient_norm(u, 1).powi(2)).collect();
    let work = traj
        .times
        .iter()
        .zip(&traj.fields)
        .map(|(&t, u)| inner_l2(&forcing_at(f, t, ell, cutoff)?, u))
        .collect::<Result<Vec<_>>>()?;
    let dis = cumulative_trapezoid(&traj.times, &dissipation);
    let wk = cumulative_trapezoid(&traj.times, &work);
    let e0 = 0.5 * l2_norm_exact(traj.initial()).powi(2);
    Ok(traj
        .fields
        .iter()
        .enumerate()
        .map(|(i, u)| 0.5 * l2_norm_exact(u).powi(2) + mu * dis[i] - e0 - wk[i])
        .collect())
}
