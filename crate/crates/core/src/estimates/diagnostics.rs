use num_complex::Complex64;
use serde::Serialize;

use super::bochner::multi_indices;
use crate::error::{Result, TorusError};
use crate::spectral::{bandwidth, base_wavenumber, gradient_norm, lp_norm, nonlinear_d, VectorField};

/// `∂^α u`.
pub fn partial(u: &VectorField, alpha: [u32; 3]) -> VectorField {
    let kappa = base_wavenumber(u.ell());
    u.map_modes(|k| {
        (0..3).fold(Complex64::new(1.0, 0.0), |acc, l| {
            acc * Complex64::new(0.0, kappa * k.0[l] as f64).powu(alpha[l])
        })
    })
}

/// `max_{|α| = j} ‖∂^α u‖_{L^p}` on an `n³` grid.
pub fn max_partial_lp(u: &VectorField, j: u32, p: f64, n: usize) -> Result<f64> {
    multi_indices(j).into_iter().try_fold(0.0, |m: f64, a| Ok(m.max(lp_norm(&partial(u, a), p, n)?)))
}

/// Exponents and constants of one Gagliardo-Nirenberg inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnExponents {
    pub j0: u32,
    pub k0: u32,
    pub p0: f64,
    pub q0: f64,
    pub r0: f64,
    pub s0: f64,
    pub a: f64,
}

impl GnExponents {
    /// `1/p₀ = j₀/3 + a(1/r₀ - k₀/3) + (1-a)/q₀`, `j₀/k₀ <= a <= 1`, `s₀ >= 1`.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(TorusError::InadmissibleExponents(m));
        for (name, p) in [("p0", self.p0), ("q0", self.q0), ("r0", self.r0), ("s0", self.s0)] {
            if p.is_nan() || p < 1.0 {
                return bad(format!("{name} = {p} is not in [1, ∞]"));
            }
        }
        if !(0.0..=1.0).contains(&self.a) {
            return bad(format!("a = {} is not in [0, 1]", self.a));
        }
        let lower = if self.k0 == 0 {
            if self.j0 > 0 {
                return bad("k0 = 0 requires j0 = 0".into());
            }
            0.0
        } else {
            self.j0 as f64 / self.k0 as f64
        };
        if self.a < lower - 1e-14 {
            return bad(format!("a = {} is below j0/k0 = {lower}", self.a));
        }
        let lhs = 1.0 / self.p0;
        let rhs = self.j0 as f64 / 3.0
            + self.a * (1.0 / self.r0 - self.k0 as f64 / 3.0)
            + (1.0 - self.a) / self.q0;
        if (lhs - rhs).abs() > 1e-12 {
            return bad(format!("1/p0 = {lhs} but the scaling condition gives {rhs}"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GnReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Both sides of `‖∇^{j₀}u‖_{L^{p₀}} <= c₁‖∇^{k₀}u‖^a_{L^{r₀}} ‖u‖^{1-a}_{L^{q₀}} + c₂‖u‖_{L^{s₀}}`
/// with `‖∇^j u‖_{L^p} = max_{|α| = j} ‖∂^α u‖_{L^p}`.
pub fn gn_report(u: &VectorField, e: &GnExponents, c1: f64, c2: f64, n: usize) -> Result<GnReport> {
    e.check()?;
    let lhs = max_partial_lp(u, e.j0, e.p0, n)?;
    let top = max_partial_lp(u, e.k0, e.r0, n)?;
    let rhs = c1 * top.powf(e.a) * lp_norm(u, e.q0, n)?.powf(1.0 - e.a) + c2 * lp_norm(u, e.s0, n)?;
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(GnReport { lhs, rhs, ratio })
}

/// Left side and the four right-side quantities of the bound on `‖(-Δ)^{k/2} 𝐃u‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonlinearBoundReport {
    pub lhs: f64,
    /// `ε ‖∇^{k+2} u‖²`.
    pub top_order: f64,
    /// `‖u‖^s_{L^r} ‖∇^{k+1} u‖²`.
    pub lps_weighted: f64,
    /// `‖u‖²_{L²} ‖u‖²_{L^r}`.
    pub mixed: f64,
    /// `‖u‖²_{L²}`.
    pub energy: f64,
}

impl NonlinearBoundReport {
    /// Smallest `c` with `lhs <= top_order + c (lps_weighted + mixed + energy)`.
    pub fn fitted_constant(&self) -> f64 {
        let rest = self.lps_weighted + self.mixed + self.energy;
        if rest > 0.0 {
            ((self.lhs - self.top_order) / rest).max(0.0)
        } else {
            0.0
        }
    }
}

/// `𝐃u` is evaluated without truncation, on a cutoff holding every product mode.
pub fn nonlinear_term_bound_report(
    u: &VectorField,
    k: u32,
    s: f64,
    r: f64,
    eps: f64,
    n: usize,
) -> Result<NonlinearBoundReport> {
    if !(eps > 0.0) {
        return Err(TorusError::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    let wide = 2 * bandwidth(u.cutoff()) as u32;
    let du = nonlinear_d(&u.with_cutoff(3 * wide * wide))?;
    let lhs = gradient_norm(&du, k).powi(2);
    let lr = lp_norm(u, r, n)?;
    let l2 = gradient_norm(u, 0).powi(2);
    Ok(NonlinearBoundReport {
        lhs,
        top_order: eps * gradient_norm(u, k + 2).powi(2),
        lps_weighted: lr.powf(s) * gradient_norm(u, k + 1).powi(2),
        mixed: l2 * lr * lr,
        energy: l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(j0: u32, k0: u32, p0: f64, q0: f64, r0: f64, a: f64) -> GnExponents {
        GnExponents { j0, k0, p0, q0, r0, s0: 2.0, a }
    }

    #[test]
    fn exponent_conditions() {
        assert!(ex(0, 1, 3.0, 2.0, 2.0, 0.5).check().is_ok());
        assert!(ex(0, 1, 3.0, 2.0, 2.0, 0.4).check().is_err());
        assert!(ex(1, 2, 2.0, 2.0, 2.0, 0.5).check().is_ok());
        // j0/k0 = 1 > a
        assert!(matches!(ex(1, 1, 2.0, 2.0, 2.0, 0.5).check(), Err(TorusError::InadmissibleExponents(_))));
    }

    #[test]
    fn constant_field_has_zero_lhs() {
        let u = VectorField::constant(1.0, 2, [1.0, 2.0, 0.0]);
        let r = gn_report(&u, &ex(1, 2, 2.0, 2.0, 2.0, 0.5), 1.0, 1.0, 8).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, 0.0);
        assert_eq!(nonlinear_term_bound_report(&u, 1, 4.0, 6.0, 0.1, 8).unwrap().lhs, 0.0);
    }
}
