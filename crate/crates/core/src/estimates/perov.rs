use crate::error::{Result, TorusError};
use crate::galerkin::cumulative_trapezoid;

/// Data of the integral inequality `Y(t) <= A + ∫_a^t (B Y + C Y^{1-γ})`.
#[derive(Clone, Debug)]
pub struct PerovInput {
    pub a: f64,
    pub gamma: f64,
    pub times: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl PerovInput {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(TorusError::InvalidExponent(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if !(self.a >= 0.0) {
            return Err(TorusError::NegativeSample { what: "A", index: 0, value: self.a });
        }
        if self.times.is_empty() || self.b.len() != self.times.len() || self.c.len() != self.times.len() {
            return Err(TorusError::InvalidInput("B and C need one sample per grid point".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(TorusError::InvalidInput("time grid must increase strictly".into()));
        }
        for (what, v) in [("B", &self.b), ("C", &self.c)] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
                return Err(TorusError::NegativeSample { what, index, value });
            }
        }
        Ok(())
    }
}

/// `(A^γ e^{γ∫_a^t B} + γ ∫_a^t C(s) e^{γ∫_s^t B} ds)^{1/γ}` at every grid point, with
/// trapezoid quadrature for both integrals. For `γ = 1` this is the Gronwall bound.
pub fn perov_bound(input: &PerovInput) -> Result<Vec<f64>> {
    input.validate()?;
    let g = input.gamma;
    let ib = cumulative_trapezoid(&input.times, &input.b);
    let weighted: Vec<f64> = input.c.iter().zip(&ib).map(|(c, i)| c * (-g * i).exp()).collect();
    let ic = cumulative_trapezoid(&input.times, &weighted);
    Ok(ib
        .iter()
        .zip(&ic)
        .map(|(i, j)| {
            let grow = (g * i).exp();
            (input.a.powf(g) * grow + g * j * grow).powf(1.0 / g)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn rejects_bad_input() {
        let t = grid(4);
        let ok = PerovInput { a: 1.0, gamma: 1.0, times: t.clone(), b: vec![0.0; 5], c: vec![0.0; 5] };
        assert!(perov_bound(&ok).is_ok());
        let mut bad = ok.clone();
        bad.c[2] = -1e-3;
        assert!(matches!(perov_bound(&bad), Err(TorusError::NegativeSample { what: "C", index: 2, .. })));
        let mut bad = ok.clone();
        bad.gamma = 1.5;
        assert!(perov_bound(&bad).is_err());
        let mut bad = ok;
        bad.times[3] = bad.times[2];
        assert!(perov_bound(&bad).is_err());
    }

    #[test]
    fn constant_without_growth() {
        let t = grid(10);
        let input = PerovInput { a: 2.5, gamma: 1.0, times: t, b: vec![0.0; 11], c: vec![0.0; 11] };
        assert!(perov_bound(&input).unwrap().iter().all(|y| (y - 2.5).abs() < 1e-15));
    }
}
