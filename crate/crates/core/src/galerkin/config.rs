use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TorusError};
use crate::spectral::{bandwidth, dealias_grid};

/// Time integration scheme for the stiff diffusion / explicit transport splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Backward Euler on diffusion, forward Euler on everything else. First order.
    ImexEuler,
    /// Integrating-factor (Lawson) RK4 with the exact diffusion propagator. Fourth order.
    IfRk4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::ImexEuler => 1,
            Scheme::IfRk4 => 4,
        }
    }
}

impl FromStr for Scheme {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "imex_euler" | "imex" => Ok(Scheme::ImexEuler),
            "if_rk4" | "ifrk4" | "rk4" => Ok(Scheme::IfRk4),
            other => Err(TorusError::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ImexEuler => "imex_euler",
            Scheme::IfRk4 => "if_rk4",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Viscosity `μ > 0`.
    pub mu: f64,
    /// Horizon `T > 0`.
    pub horizon: f64,
    /// Shell cutoff `M` of the Galerkin space.
    pub cutoff: u32,
    pub dt: f64,
    pub scheme: Scheme,
    /// Grid for the quadratic terms; defaults to the smallest alias-free one.
    pub grid: Option<usize>,
    /// Store every `sample_stride`-th step.
    pub sample_stride: usize,
    /// Rerun with `dt/2` and attach twice the Richardson estimate
    /// `2^p/(2^p - 1) · max_t ‖u_dt - u_{dt/2}‖_{L²}` as error estimate.
    pub step_halving: bool,
    /// Reject the run when the step-halving estimate exceeds this value.
    pub tolerance: Option<f64>,
}

impl SolverConfig {
    pub fn new(mu: f64, horizon: f64, cutoff: u32, dt: f64) -> Self {
        SolverConfig {
            mu,
            horizon,
            cutoff,
            dt,
            scheme: Scheme::IfRk4,
            grid: None,
            sample_stride: 1,
            step_halving: false,
            tolerance: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TorusError::InvalidInput(m));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("viscosity must be positive, got {}", self.mu));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return bad(format!("time step must lie in (0, T], got {}", self.dt));
        }
        if self.sample_stride == 0 {
            return bad("sample stride must be at least 1".into());
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return bad(format!("time step {} does not divide the horizon {}", self.dt, self.horizon));
        }
        let need = 3 * bandwidth(self.cutoff) as usize + 1;
        if let Some(n) = self.grid {
            if n < 4 || !n.is_power_of_two() {
                return Err(TorusError::InvalidGrid(n));
            }
            if n < need {
                return Err(TorusError::Undersampled { n, required: need });
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Step actually taken, `T / steps`.
    pub fn step(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn grid_size(&self) -> usize {
        self.grid.unwrap_or_else(|| dealias_grid(self.cutoff))
    }

    pub(crate) fn halving_estimate(&self, difference: f64) -> f64 {
        let q = 2f64.powi(self.scheme.order() as i32);
        2.0 * q / (q - 1.0) * difference
    }

    pub(crate) fn halved(&self) -> Self {
        SolverConfig {
            dt: self.dt / 2.0,
            sample_stride: self.sample_stride * 2,
            step_halving: false,
            tolerance: None,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_parsing() {
        assert_eq!("IF_RK4".parse::<Scheme>().unwrap(), Scheme::IfRk4);
        assert_eq!("imex_euler".parse::<Scheme>().unwrap(), Scheme::ImexEuler);
        assert!("euler".parse::<Scheme>().is_err());
    }

    #[test]
    fn validation() {
        assert!(SolverConfig::new(0.1, 1.0, 4, 1e-3).validate().is_ok());
        assert!(SolverConfig::new(0.0, 1.0, 4, 1e-3).validate().is_err());
        assert!(SolverConfig::new(0.1, 1.0, 4, 2.0).validate().is_err());
        assert!(SolverConfig::new(0.1, 1.0, 4, 0.3).validate().is_err());
        let mut c = SolverConfig::new(0.1, 1.0, 9, 1e-3);
        c.grid = Some(8);
        assert!(matches!(c.validate(), Err(TorusError::Undersampled { .. })));
        assert_eq!(SolverConfig::new(0.1, 1.0, 4, 1e-3).steps(), 1000);
    }
}
