//! Reference flows with known solutions: shear decay, Taylor-Green data, and manufactured
//! solutions with their forcing.

use num_complex::Complex64;

use crate::eigenbasis::build_basis;
use crate::error::{Result, TorusError};
use crate::estimates::ForcingJet;
use crate::galerkin::Forcing;
use crate::spectral::{
    bandwidth, base_wavenumber, convect, div, grad, hs_norm, l2_norm_exact, laplacian, ScalarField,
    VectorField, WaveVector,
};

/// `a sin(2πx₂/ℓ) e₁`.
pub fn shear_mode(ell: f64, cutoff: u32, amplitude: f64) -> VectorField {
    let mut u = VectorField::zeros(ell, cutoff.max(1));
    u.component_mut(0)
        .set_coeff(WaveVector::new(0, 1, 0), Complex64::new(0.0, -0.5 * amplitude))
        .expect("shell one is admitted");
    u
}

/// Decay rate `μ(2π/ℓ)²` of the shear mode.
pub fn shear_rate(ell: f64, mu: f64) -> f64 {
    mu * base_wavenumber(ell).powi(2)
}

/// Exact unforced solution started from [`shear_mode`].
pub fn shear_decay_exact(ell: f64, cutoff: u32, amplitude: f64, mu: f64, t: f64) -> VectorField {
    shear_mode(ell, cutoff, amplitude * (-shear_rate(ell, mu) * t).exp())
}

/// Taylor-Green data `a (sin x cos y cos z, -cos x sin y cos z, 0)` with `x = 2πx₁/ℓ` etc.
pub fn taylor_green(ell: f64, cutoff: u32, amplitude: f64) -> Result<VectorField> {
    if cutoff < 3 {
        return Err(TorusError::InvalidInput("Taylor-Green data needs cutoff >= 3".into()));
    }
    let mut u = VectorField::zeros(ell, cutoff);
    for s1 in [-1, 1] {
        for s2 in [-1, 1] {
            for s3 in [-1, 1] {
                let k = WaveVector::new(s1, s2, s3);
                let a = amplitude / 8.0;
                u.set_coeff(
                    k,
                    [Complex64::new(0.0, -a * s1 as f64), Complex64::new(0.0, a * s2 as f64), Complex64::new(0.0, 0.0)],
                )?;
            }
        }
    }
    Ok(u)
}

/// `φ(t) = c + a sin(ωt) + b cos(ωt)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeFactor {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub omega: f64,
}

impl TimeFactor {
    pub fn constant(c: f64) -> Self {
        TimeFactor { c, a: 0.0, b: 0.0, omega: 0.0 }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// `φ^{(n)}(t)`.
    pub fn derivative(&self, t: f64, n: u32) -> f64 {
        let (s, c) = (self.omega * t).sin_cos();
        let w = self.omega.powi(n as i32);
        // d/dt rotates (sin, cos) -> (cos, -sin)
        let (ds, dc) = match n % 4 {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        };
        let base = if n == 0 { self.c } else { 0.0 };
        base + w * (self.a * ds + self.b * dc)
    }
}

/// `u*(t) = Σ_a φ_a(t) V_a` with divergence-free `V_a`, pressure `p*(t) = ψ(t) P`, and the
/// forcing `f = ∂_t u* - μΔu* + 𝐃u* + ∇p*` that makes the pair an exact solution.
#[derive(Clone, Debug)]
pub struct ManufacturedSolution {
    pub ell: f64,
    pub mu: f64,
    /// Cutoff holding every mode of the velocity.
    pub cutoff: u32,
    pub modes: Vec<(TimeFactor, VectorField)>,
    pub pressure: Option<(TimeFactor, ScalarField)>,
    /// `(V_a·∇)V_b` without truncation.
    transports: Vec<Vec<VectorField>>,
    /// `-ΔV_a`.
    stiffness: Vec<VectorField>,
    /// Cutoff of the forcing, holding every product mode.
    forcing_cutoff: u32,
}

impl ManufacturedSolution {
    pub fn new(
        mu: f64,
        modes: Vec<(TimeFactor, VectorField)>,
        pressure: Option<(TimeFactor, ScalarField)>,
    ) -> Result<Self> {
        let first = &modes
            .first()
            .ok_or_else(|| TorusError::InvalidInput("a manufactured solution needs at least one mode".into()))?
            .1;
        let ell = first.ell();
        let cutoff = modes.iter().map(|(_, v)| v.cutoff()).max().unwrap();
        for (_, v) in &modes {
            if v.ell() != ell {
                return Err(TorusError::IncompatibleDomains { left: v.ell(), right: ell });
            }
            let divergence = l2_norm_exact(&div(v));
            if divergence > 1e-12 * hs_norm(v, 1.0) {
                return Err(TorusError::NotDivergenceFree { t: 0.0, divergence });
            }
        }
        let wide = 2 * bandwidth(cutoff) as u32;
        let forcing_cutoff = 3 * wide * wide;
        let wide_modes: Vec<VectorField> = modes.iter().map(|(_, v)| v.with_cutoff(forcing_cutoff)).collect();
        let transports = wide_modes
            .iter()
            .map(|a| wide_modes.iter().map(|b| convect(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let stiffness = wide_modes.iter().map(|v| laplacian(v).scaled(-1.0)).collect();
        Ok(ManufacturedSolution { ell, mu, cutoff, modes, pressure, transports, stiffness, forcing_cutoff })
    }

    pub fn velocity(&self, t: f64) -> VectorField {
        let mut u = VectorField::zeros(self.ell, self.cutoff);
        for (phi, v) in &self.modes {
            u.axpy(phi.value(t), &v.with_cutoff(self.cutoff));
        }
        u
    }

    /// `∂_t^n u*(t)`.
    pub fn velocity_derivative(&self, t: f64, n: u32) -> VectorField {
        let mut u = VectorField::zeros(self.ell, self.cutoff);
        for (phi, v) in &self.modes {
            u.axpy(phi.derivative(t, n), &v.with_cutoff(self.cutoff));
        }
        u
    }

    pub fn pressure(&self, t: f64) -> ScalarField {
        match &self.pressure {
            Some((psi, p)) => p.scaled(psi.value(t)),
            None => ScalarField::zeros(self.ell, self.cutoff),
        }
    }

    /// `∂_t^n f(t)` at the full product cutoff.
    pub fn forcing_derivative(&self, t: f64, n: u32) -> VectorField {
        self.forcing(self.forcing_cutoff).derivative(t, n)
    }

    pub fn forcing_value(&self, t: f64) -> VectorField {
        self.forcing_derivative(t, 0)
    }

    /// The forcing truncated to `cutoff`, for a solver running at that cutoff.
    pub fn forcing(&self, cutoff: u32) -> ManufacturedForcing {
        let cut = |v: &VectorField| v.with_cutoff(cutoff);
        ManufacturedForcing {
            factors: self.modes.iter().map(|(phi, _)| *phi).collect(),
            mu: self.mu,
            modes: self.modes.iter().map(|(_, v)| cut(v)).collect(),
            stiffness: self.stiffness.iter().map(cut).collect(),
            transports: self.transports.iter().map(|row| row.iter().map(cut).collect()).collect(),
            pressure: self.pressure.as_ref().map(|(psi, p)| (*psi, grad(&p.with_cutoff(cutoff)))),
        }
    }
}

/// Forcing of a [`ManufacturedSolution`] truncated to a solver cutoff.
#[derive(Clone, Debug)]
pub struct ManufacturedForcing {
    factors: Vec<TimeFactor>,
    mu: f64,
    modes: Vec<VectorField>,
    stiffness: Vec<VectorField>,
    transports: Vec<Vec<VectorField>>,
    pressure: Option<(TimeFactor, VectorField)>,
}

impl ManufacturedForcing {
    /// `∂_t^n f(t)`.
    pub fn derivative(&self, t: f64, n: u32) -> VectorField {
        let mut f = self.modes[0].scaled(0.0);
        for (a, phi) in self.factors.iter().enumerate() {
            f.axpy(phi.derivative(t, n + 1), &self.modes[a]);
            f.axpy(self.mu * phi.derivative(t, n), &self.stiffness[a]);
        }
        // Leibniz rule for φ_a φ_b
        for (a, pa) in self.factors.iter().enumerate() {
            for (b, pb) in self.factors.iter().enumerate() {
                let mut c = 0.0;
                let mut binom = 1.0;
                for l in 0..=n {
                    c += binom * pa.derivative(t, l) * pb.derivative(t, n - l);
                    binom = binom * (n - l) as f64 / (l + 1) as f64;
                }
                f.axpy(c, &self.transports[a][b]);
            }
        }
        if let Some((psi, gp)) = &self.pressure {
            f.axpy(psi.derivative(t, n), gp);
        }
        f
    }
}

impl Forcing for ManufacturedForcing {
    fn eval(&self, t: f64) -> Result<VectorField> {
        Ok(self.derivative(t, 0))
    }
}

impl ForcingJet for ManufacturedForcing {
    fn time_derivative(&self, t: f64, order: u32) -> Result<VectorField> {
        Ok(self.derivative(t, order))
    }
}

/// Two-shell solution used for temporal convergence: one shell-1 and one shell-2 basis
/// field with oscillating amplitudes, plus a shell-1 pressure. For any cutoff `M >= 2` it is
/// an exact solution of the truncated system, so solver errors are purely temporal.
pub fn temporal_manufactured(ell: f64, mu: f64, omega: f64) -> Result<ManufacturedSolution> {
    let basis = build_basis(ell, 2);
    let pick = |m: u32| {
        basis
            .entries
            .iter()
            .find(|e| e.m == m)
            .expect("shells one and two are populated")
            .to_field(ell, 2)
    };
    let v1 = pick(1);
    let v2 = pick(2);
    let p = ScalarField::from_modes(ell, 2, [(WaveVector::new(1, 0, 1), Complex64::new(0.3, 0.1))])?;
    ManufacturedSolution::new(
        mu,
        vec![
            (TimeFactor { c: 1.0, a: 0.5, b: 0.0, omega }, v1),
            (TimeFactor { c: 0.0, a: 0.0, b: 0.8, omega: 1.5 * omega }, v2),
        ],
        Some((TimeFactor { c: 0.5, a: 0.0, b: 0.5, omega }, p)),
    )
}

/// `u = φ(t) (g(x₂), 0, h(x₁))` with Poisson-kernel profiles `ĝ_n = r^{|n|}`,
/// `ĥ_n = i sign(n) r^{|n|}/2`, truncated at `|n| <= n_max`. Analytic in space, so the
/// spectral truncation error decays geometrically in the bandwidth.
pub fn spectral_manufactured(ell: f64, mu: f64, r: f64, n_max: i32) -> Result<ManufacturedSolution> {
    if !(0.0 < r && r < 1.0) {
        return Err(TorusError::InvalidInput(format!("profile ratio must lie in (0, 1), got {r}")));
    }
    let cutoff = (n_max * n_max) as u32;
    let mut v = VectorField::zeros(ell, cutoff);
    for n in 1..=n_max {
        let rn = r.powi(n);
        v.component_mut(0).set_coeff(WaveVector::new(0, n, 0), Complex64::new(rn, 0.0))?;
        v.component_mut(2).set_coeff(WaveVector::new(n, 0, 0), Complex64::new(0.0, 0.5 * rn))?;
    }
    ManufacturedSolution::new(mu, vec![(TimeFactor { c: 1.0, a: 0.3, b: 0.0, omega: 2.0 }, v)], None)
}

/// `‖∂_t u* - μΔu* + 𝐃u* + ∇p* - f‖_{L²}` evaluated on the full product cutoff.
pub fn manufactured_defect(problem: &ManufacturedSolution, t: f64) -> Result<f64> {
    let c = problem.forcing_cutoff;
    let u = problem.velocity(t).with_cutoff(c);
    let mut r = problem.velocity_derivative(t, 1).with_cutoff(c);
    r.axpy(-problem.mu, &laplacian(&u));
    r += &convect(&u, &u)?;
    r += &grad(&problem.pressure(t).with_cutoff(c));
    r -= &problem.forcing_value(t);
    Ok(l2_norm_exact(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::nonlinear_d;
    use std::f64::consts::PI;

    #[test]
    fn time_factor_derivatives() {
        let phi = TimeFactor { c: 1.0, a: 0.5, b: -0.2, omega: 3.0 };
        let h = 1e-5;
        for n in 0..4 {
            let fd = (phi.derivative(0.7 + h, n) - phi.derivative(0.7 - h, n)) / (2.0 * h);
            assert!((fd - phi.derivative(0.7, n + 1)).abs() < 1e-6 * 3f64.powi(n as i32 + 1));
        }
    }

    #[test]
    fn taylor_green_is_solenoidal() {
        let u = taylor_green(2.0 * PI, 3, 1.0).unwrap();
        assert!(l2_norm_exact(&div(&u)) < 1e-14);
        // ‖u‖² = a² ℓ³/4
        let e = l2_norm_exact(&u).powi(2);
        assert!((e - (2.0 * PI).powi(3) / 4.0).abs() < 1e-10);
    }

    #[test]
    fn shear_mode_is_steady_under_transport() {
        let u = shear_mode(2.0, 4, 1.5);
        assert!(nonlinear_d(&u).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn manufactured_defects_vanish() {
        let p = temporal_manufactured(2.0 * PI, 0.1, 6.0).unwrap();
        let q = spectral_manufactured(2.0 * PI, 0.1, 0.2, 3).unwrap();
        for t in [0.0, 0.37, 1.0] {
            assert!(manufactured_defect(&p, t).unwrap() < 1e-12);
            assert!(manufactured_defect(&q, t).unwrap() < 1e-12);
        }
    }
}
