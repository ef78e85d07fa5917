use super::config::SolverConfig;
use super::stepper::{integrate, SplitSystem};
use super::trajectory::{forcing_at, FieldTrajectory, Forcing};
use crate::error::{Result, TorusError};
use crate::helmholtz::leray_project;
use crate::spectral::{
    bandwidth, base_wavenumber, convect_on, div, gradient_norm, l2_norm_exact, laplace_eigenvalue,
    laplacian, lp_norm, VectorField,
};

/// Coefficients above this size are treated as a blow-up.
const BLOW_UP_LIMIT: f64 = 1e150;

struct NsSystem<'a> {
    mu: f64,
    ell: f64,
    cutoff: u32,
    grid: usize,
    forcing: &'a dyn Forcing,
}

impl NsSystem<'_> {
    /// `P(f - 𝐃u)`.
    fn transport(&self, t: f64, u: &VectorField) -> Result<VectorField> {
        let mut g = forcing_at(self.forcing, t, self.ell, self.cutoff)?;
        g -= &convect_on(u, u, self.grid)?;
        Ok(leray_project(&g))
    }

    /// `∂_t u = μΔu + P(f - 𝐃u)`.
    fn rate(&self, t: f64, u: &VectorField) -> Result<VectorField> {
        let mut r = self.transport(t, u)?;
        r.axpy(self.mu, &laplacian(u));
        Ok(r)
    }
}

impl SplitSystem for NsSystem<'_> {
    type State = VectorField;

    fn decay(&self, y: &VectorField, h: f64) -> VectorField {
        let (mu, ell) = (self.mu, self.ell);
        y.map_real_modes(|k| (-mu * laplace_eigenvalue(k, ell) * h).exp())
    }

    fn resolvent(&self, y: &VectorField, h: f64) -> VectorField {
        let (mu, ell) = (self.mu, self.ell);
        y.map_real_modes(|k| 1.0 / (1.0 + mu * laplace_eigenvalue(k, ell) * h))
    }

    fn explicit(&self, t: f64, y: &VectorField) -> Result<VectorField> {
        self.transport(t, y)
    }

    fn axpy(&self, y: &mut VectorField, a: f64, x: &VectorField) {
        y.axpy(a, x);
    }
}

/// `‖div u‖_{L²}` against `tol · max(‖u‖_{L²}, ‖∇u‖_{L²})`.
pub(crate) fn check_divergence(u: &VectorField, t: f64, tol: f64) -> Result<()> {
    let d = l2_norm_exact(&div(u));
    let scale = l2_norm_exact(u).max(gradient_norm(u, 1));
    if d > tol * scale.max(f64::MIN_POSITIVE) && d > 0.0 {
        return Err(TorusError::NotDivergenceFree { t, divergence: d });
    }
    Ok(())
}

fn run(f: &dyn Forcing, u0: &VectorField, config: &SolverConfig) -> Result<FieldTrajectory> {
    let sys = NsSystem {
        mu: config.mu,
        ell: u0.ell(),
        cutoff: config.cutoff,
        grid: config.grid_size(),
        forcing: f,
    };
    let h = config.step();
    let (times, fields) =
        integrate(&sys, config.scheme, u0.clone(), config.steps(), h, config.sample_stride, |t, u| {
            if !u.is_finite() || u.max_abs_coeff() > BLOW_UP_LIMIT {
                return Err(TorusError::BlowUp { t });
            }
            Ok(())
        })?;
    let rhs = times
        .iter()
        .zip(&fields)
        .map(|(&t, u)| sys.rate(t, u))
        .collect::<Result<Vec<_>>>()?;
    FieldTrajectory::new(times, fields)?.with_rhs(rhs)
}

fn cfl_advisory(traj: &FieldTrajectory, config: &SolverConfig) -> Result<()> {
    let kappa = base_wavenumber(traj.ell());
    let kmax = bandwidth(config.cutoff) as f64;
    let n = config.grid_size();
    for (t, u) in traj.times.iter().zip(&traj.fields) {
        let sup = lp_norm(u, f64::INFINITY, n)?;
        let cfl = sup * config.step() * kappa * kmax;
        if cfl > 0.5 {
            log::warn!("CFL number {cfl:.3} exceeds 0.5 at t = {t}");
            break;
        }
    }
    Ok(())
}

/// Integrates `∂_t u = μΔu + P(f - 𝐃u)` in the span of the modes `(k,k) <= M`.
///
/// `u0` is truncated to the cutoff. Diffusion is treated exactly (`IfRk4`) or implicitly
/// (`ImexEuler`); the transport term is explicit and dealiased. The trajectory carries the
/// rates `∂_t u` at every stored sample.
pub fn solve_navier_stokes(f: &dyn Forcing, u0: &VectorField, config: &SolverConfig) -> Result<FieldTrajectory> {
    config.validate()?;
    check_divergence(u0, 0.0, 1e-10)?;
    let u0 = u0.with_cutoff(config.cutoff);
    let mut traj = run(f, &u0, config)?;
    for (t, u) in traj.times.iter().zip(&traj.fields) {
        check_divergence(u, *t, 1e-12)?;
    }
    cfl_advisory(&traj, config)?;
    if config.step_halving {
        let fine = run(f, &u0, &config.halved())?;
        let diff = traj
            .fields
            .iter()
            .zip(&fine.fields)
            .map(|(a, b)| l2_norm_exact(&(a - b)))
            .fold(0.0, f64::max);
        let estimate = config.halving_estimate(diff);
        if let Some(tol) = config.tolerance {
            if estimate > tol {
                return Err(TorusError::StepRejected { estimate, tolerance: tol });
            }
        }
        traj.error_estimate = Some(estimate);
    }
    Ok(traj)
}
