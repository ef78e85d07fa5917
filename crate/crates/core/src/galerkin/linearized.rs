use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::config::SolverConfig;
use super::navier_stokes::check_divergence;
use super::stepper::{integrate, SplitSystem};
use super::trajectory::{FieldTrajectory, Forcing};
use crate::eigenbasis::{BasisElement, DivFreeBasis};
use crate::error::{Result, TorusError};
use crate::expm::autonomous_solution;
use crate::spectral::{base_wavenumber, dealias_grid, derivative, Fft3, ScalarField, VectorField};

/// Relative tolerance of the integration-by-parts check on the transport entries.
const BY_PARTS_TOL: f64 = 1e-11;

/// Matrices `A_M(t)` of the Galerkin system `c' + A_M(t) c = f_M(t)` for the problem
/// linearised around a divergence-free drift `w`.
///
/// Rows and columns follow [`DivFreeBasis::solenoidal_system`]:
/// `A = μ m (2π/ℓ)² δ + (𝐁(w, v'), v)_{L²}`.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    pub ell: f64,
    pub mu: f64,
    pub cutoff: u32,
    /// Shell index of each coordinate.
    pub shells: Vec<u32>,
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
    /// Largest disagreement between the two forms of the transport entries, relative to
    /// the largest entry.
    pub by_parts_defect: f64,
}

impl LinearizedOperator {
    pub fn dim(&self) -> usize {
        self.shells.len()
    }

    /// `μ m (2π/ℓ)²` per coordinate.
    pub fn diffusion(&self) -> Vec<f64> {
        let kappa = base_wavenumber(self.ell);
        self.shells.iter().map(|&m| self.mu * m as f64 * kappa * kappa).collect()
    }

    pub fn is_autonomous(&self) -> bool {
        self.matrices.windows(2).all(|w| w[0] == w[1])
    }

    /// `A_M(t)`, linearly interpolated between the drift samples.
    pub fn matrix_at(&self, t: f64) -> DMatrix<f64> {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.matrices[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.matrices[n - 1].clone();
        }
        let i = self.times.partition_point(|&x| x <= t).clamp(1, n - 1);
        let s = (t - self.times[i - 1]) / (self.times[i] - self.times[i - 1]);
        &self.matrices[i - 1] * (1.0 - s) + &self.matrices[i] * s
    }

    /// `exp(-tA) c0 + ∫_0^t exp(-(t-s)A) f ds` for a time-independent operator and source.
    pub fn exponential_solution(&self, c0: &DVector<f64>, f: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        if !self.is_autonomous() {
            return Err(TorusError::InvalidInput(
                "the closed-form solution needs a time-independent drift".into(),
            ));
        }
        Ok(autonomous_solution(&self.matrices[0], c0, f, t))
    }
}

/// `(T, ∂_j v_i)_{L²}` for a single-mode basis element, from the coefficient of `T` at `k`.
fn inner_with_derivative(t: &ScalarField, e: &BasisElement, i: usize, j: usize, kappa: f64) -> f64 {
    if e.k.is_zero() {
        return 0.0;
    }
    let d = e.amplitude[i] * Complex64::new(0.0, kappa * e.k.0[j] as f64);
    2.0 * t.ell().powi(3) * (t.coeff(e.k) * d.conj()).re
}

/// Both forms of the transport block for one drift sample:
/// `(w·∇v' + v'·∇w, v)` and `(w·∇v', v) - Σ_ij (w_i v'_j, ∂_j v_i)`.
fn transport_block(w: &VectorField, basis: &DivFreeBasis) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let ell = basis.ell;
    let kappa = base_wavenumber(ell);
    let cutoff = w.cutoff().max(basis.cutoff);
    let w = w.with_cutoff(cutoff);
    let n = dealias_grid(cutoff);
    let fft = Fft3::get(n);
    let len = n * n * n;

    let wg: Vec<Vec<f64>> = w.components().iter().map(|c| fft.synthesize(c)).collect();
    let dwg: Vec<Vec<Vec<f64>>> = w
        .components()
        .iter()
        .map(|c| (0..3).map(|j| fft.synthesize(&derivative(c, j))).collect())
        .collect();

    let elements: Vec<&BasisElement> = basis.solenoidal_system().collect();
    let dim = elements.len();
    let mut full = DMatrix::zeros(dim, dim);
    let mut by_parts = DMatrix::zeros(dim, dim);
    for (col, e) in elements.iter().enumerate() {
        let v = e.to_field(ell, cutoff);
        let vg: Vec<Vec<f64>> = v.components().iter().map(|c| fft.synthesize(c)).collect();
        let dvg: Vec<Vec<Vec<f64>>> = v
            .components()
            .iter()
            .map(|c| (0..3).map(|j| fft.synthesize(&derivative(c, j))).collect())
            .collect();
        let mut first = Vec::with_capacity(3);
        let mut second = Vec::with_capacity(3);
        for i in 0..3 {
            let mut a = vec![0.0; len];
            let mut b = vec![0.0; len];
            for j in 0..3 {
                for p in 0..len {
                    a[p] += wg[j][p] * dvg[i][j][p];
                    b[p] += vg[j][p] * dwg[i][j][p];
                }
            }
            first.push(fft.analyze(ell, &a, cutoff));
            second.push(fft.analyze(ell, &b, cutoff));
        }
        let first = VectorField::from_components(first.try_into().expect("three components"))?;
        let second = VectorField::from_components(second.try_into().expect("three components"))?;
        let mut tensor = Vec::with_capacity(9);
        for wi in &wg {
            for vj in &vg {
                let prod: Vec<f64> = wi.iter().zip(vj).map(|(x, y)| x * y).collect();
                tensor.push(fft.analyze(ell, &prod, cutoff));
            }
        }
        for (row, r) in elements.iter().enumerate() {
            let a = r.inner(&first);
            full[(row, col)] = a + r.inner(&second);
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += inner_with_derivative(&tensor[3 * i + j], r, i, j, kappa);
                }
            }
            by_parts[(row, col)] = a - s;
        }
    }
    Ok((full, by_parts))
}

/// Assembles `A_M(t_i)` at every sample of the drift `w`.
///
/// Transport entries come from dealiased products and exact `L²` inner products, and are
/// cross-checked against the integrated-by-parts form.
pub fn assemble_linearized(w: &FieldTrajectory, basis: &DivFreeBasis, mu: f64) -> Result<LinearizedOperator> {
    if !(mu > 0.0) {
        return Err(TorusError::InvalidInput(format!("viscosity must be positive, got {mu}")));
    }
    if w.ell() != basis.ell {
        return Err(TorusError::IncompatibleDomains { left: w.ell(), right: basis.ell });
    }
    let shells = basis.shells();
    let kappa = base_wavenumber(basis.ell);
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        shells.len(),
        shells.iter().map(|&m| mu * m as f64 * kappa * kappa),
    ));
    let mut matrices: Vec<DMatrix<f64>> = Vec::with_capacity(w.len());
    let mut worst: f64 = 0.0;
    for (idx, (t, field)) in w.times.iter().zip(&w.fields).enumerate() {
        check_divergence(field, *t, 1e-10)?;
        if idx > 0 && (field - &w.fields[idx - 1]).is_zero() {
            let prev = matrices[idx - 1].clone();
            matrices.push(prev);
            continue;
        }
        let (full, by_parts) = transport_block(field, basis)?;
        let scale = full.amax().max(1.0);
        let defect = (&full - &by_parts).amax() / scale;
        if defect > BY_PARTS_TOL {
            return Err(TorusError::InvalidInput(format!(
                "transport entries fail the integration-by-parts check at t = {t} (defect {defect:e})"
            )));
        }
        worst = worst.max(defect);
        matrices.push(&diag + full);
    }
    Ok(LinearizedOperator {
        ell: basis.ell,
        mu,
        cutoff: basis.cutoff,
        shells,
        times: w.times.clone(),
        matrices,
        by_parts_defect: worst,
    })
}

struct LinearSystem<'a> {
    op: &'a LinearizedOperator,
    diffusion: Vec<f64>,
    /// `A(t) - diag` at each drift sample.
    transport: Vec<DMatrix<f64>>,
    basis: &'a DivFreeBasis,
    forcing: &'a dyn Forcing,
}

impl LinearSystem<'_> {
    fn transport_at(&self, t: f64) -> DMatrix<f64> {
        let op = self.op;
        let n = op.times.len();
        if n == 1 || t <= op.times[0] {
            return self.transport[0].clone();
        }
        if t >= op.times[n - 1] {
            return self.transport[n - 1].clone();
        }
        let i = op.times.partition_point(|&x| x <= t).clamp(1, n - 1);
        let s = (t - op.times[i - 1]) / (op.times[i] - op.times[i - 1]);
        &self.transport[i - 1] * (1.0 - s) + &self.transport[i] * s
    }

    fn source(&self, t: f64) -> Result<DVector<f64>> {
        let f = self.forcing.eval(t)?;
        if f.ell() != self.basis.ell {
            return Err(TorusError::IncompatibleDomains { left: f.ell(), right: self.basis.ell });
        }
        Ok(DVector::from_vec(self.basis.solenoidal_coordinates(&f)))
    }

    fn rate(&self, t: f64, c: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.source(t)? - self.op.matrix_at(t) * c)
    }
}

impl SplitSystem for LinearSystem<'_> {
    type State = DVector<f64>;

    fn decay(&self, y: &DVector<f64>, h: f64) -> DVector<f64> {
        DVector::from_iterator(y.len(), y.iter().zip(&self.diffusion).map(|(c, l)| c * (-l * h).exp()))
    }

    fn resolvent(&self, y: &DVector<f64>, h: f64) -> DVector<f64> {
        DVector::from_iterator(y.len(), y.iter().zip(&self.diffusion).map(|(c, l)| c / (1.0 + l * h)))
    }

    fn explicit(&self, t: f64, y: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.source(t)? - self.transport_at(t) * y)
    }

    fn axpy(&self, y: &mut DVector<f64>, a: f64, x: &DVector<f64>) {
        y.axpy(a, x, 1.0);
    }
}

/// Galerkin coefficients `c(t_i)` of a linearised run, with the fields they represent.
#[derive(Clone, Debug)]
pub struct LinearizedSolution {
    pub coefficients: Vec<DVector<f64>>,
    pub trajectory: FieldTrajectory,
}

/// Integrates `c' + A_M(t) c = f_M(t)`, `c(0) = u_{0,M}` (the `L²` projection of `u0`).
pub fn solve_linearized(
    op: &LinearizedOperator,
    basis: &DivFreeBasis,
    f: &dyn Forcing,
    u0: &VectorField,
    config: &SolverConfig,
) -> Result<LinearizedSolution> {
    config.validate()?;
    if basis.cutoff != op.cutoff || basis.dim() != op.dim() {
        return Err(TorusError::CutoffMismatch { left: basis.cutoff, right: op.cutoff });
    }
    if u0.ell() != basis.ell {
        return Err(TorusError::IncompatibleDomains { left: u0.ell(), right: basis.ell });
    }
    check_divergence(u0, 0.0, 1e-10)?;
    let diffusion = op.diffusion();
    let diag = DMatrix::from_diagonal(&DVector::from_vec(diffusion.clone()));
    let sys = LinearSystem {
        op,
        transport: op.matrices.iter().map(|a| a - &diag).collect(),
        diffusion,
        basis,
        forcing: f,
    };
    let c0 = DVector::from_vec(basis.solenoidal_coordinates(u0));
    let integrate_with = |cfg: &SolverConfig| {
        integrate(&sys, cfg.scheme, c0.clone(), cfg.steps(), cfg.step(), cfg.sample_stride, |t, c| {
            if c.iter().any(|x| !x.is_finite()) {
                return Err(TorusError::BlowUp { t });
            }
            Ok(())
        })
    };
    let (times, coefficients) = integrate_with(config)?;
    let mut error_estimate = None;
    if config.step_halving {
        let (_, fine) = integrate_with(&config.halved())?;
        let diff = coefficients.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let estimate = config.halving_estimate(diff);
        if let Some(tol) = config.tolerance {
            if estimate > tol {
                return Err(TorusError::StepRejected { estimate, tolerance: tol });
            }
        }
        error_estimate = Some(estimate);
    }
    let fields = coefficients.iter().map(|c| basis.reconstruct(c.as_slice())).collect();
    let rhs = times
        .iter()
        .zip(&coefficients)
        .map(|(&t, c)| Ok(basis.reconstruct(sys.rate(t, c)?.as_slice())))
        .collect::<Result<Vec<_>>>()?;
    let mut trajectory = FieldTrajectory::new(times, fields)?.with_rhs(rhs)?;
    trajectory.error_estimate = error_estimate;
    Ok(LinearizedSolution { coefficients, trajectory })
}
