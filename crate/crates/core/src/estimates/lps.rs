use serde::Serialize;

use crate::error::{Result, TorusError};
use crate::galerkin::{cumulative_trapezoid, FieldTrajectory};
use crate::spectral::lp_norm;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpsReport {
    pub s: f64,
    pub r: f64,
    pub admissible: bool,
    /// `‖u‖_{L^s(I, L^r)}`.
    pub value: f64,
}

/// `2/s + 3/r = 1` with `2 <= s < ∞` and `3 < r <= ∞`.
pub fn lps_admissible(s: f64, r: f64) -> bool {
    if !(s >= 2.0 && s.is_finite() && r > 3.0) {
        return false;
    }
    (2.0 / s + 3.0 / r - 1.0).abs() <= 1e-12
}

/// `(∫_0^T ‖u(t)‖^s_{L^r} dt)^{1/s}` with `L^r` norms on an `n³` grid and the trapezoid
/// rule in time; `s = ∞` takes the sample maximum.
pub fn lps_norm(traj: &FieldTrajectory, s: f64, r: f64, n: usize) -> Result<LpsReport> {
    if s.is_nan() || s < 1.0 {
        return Err(TorusError::InvalidExponent(format!("time exponent must be >= 1, got {s}")));
    }
    if r.is_nan() || r <= 1.0 {
        return Err(TorusError::InvalidExponent(format!("space exponent must lie in (1, ∞], got {r}")));
    }
    let norms = traj.fields.iter().map(|u| lp_norm(u, r, n)).collect::<Result<Vec<_>>>()?;
    let value = if s.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        let pw: Vec<f64> = norms.iter().map(|x| x.powf(s)).collect();
        cumulative_trapezoid(&traj.times, &pw).last().unwrap().powf(1.0 / s)
    };
    Ok(LpsReport { s, r, admissible: lps_admissible(s, r), value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_arithmetic() {
        assert!(lps_admissible(4.0, 6.0));
        assert!(lps_admissible(2.0, f64::INFINITY));
        assert!(lps_admissible(8.0, 4.0));
        assert!(!lps_admissible(2.0, 6.0));
        assert!(!lps_admissible(f64::INFINITY, 3.0));
        assert!(!lps_admissible(1.0, -3.0));
    }
}
