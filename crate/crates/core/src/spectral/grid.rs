//! Uniform-grid synthesis and analysis of band-limited fields, and quadrature norms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{ScalarField, SpectralField, VectorField};
use super::wave::{bandwidth, Layout};
use crate::error::{Result, TorusError};

/// Samples `u(x_j)` on the grid `x_j = j ℓ / n`, `j ∈ {0..n-1}³`, in row-major `(j1, j2, j3)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGrid {
    pub ell: f64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl SampledGrid {
    pub fn new(ell: f64, n: usize, values: Vec<f64>) -> Result<Self> {
        check_grid(n)?;
        if values.len() != n * n * n {
            return Err(TorusError::InvalidInput(format!(
                "grid of side {n} needs {} samples, got {}",
                n * n * n,
                values.len()
            )));
        }
        Ok(SampledGrid { ell, n, values })
    }

    /// Evaluates `f(x1, x2, x3)` at every grid point.
    pub fn from_fn(ell: f64, n: usize, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        check_grid(n)?;
        let h = ell / n as f64;
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    values.push(f(i as f64 * h, j as f64 * h, l as f64 * h));
                }
            }
        }
        Ok(SampledGrid { ell, n, values })
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(TorusError::InvalidGrid(n));
    }
    Ok(())
}

/// Smallest admissible grid that resolves a field with this cutoff without aliasing.
pub fn min_grid(cutoff: u32) -> usize {
    (2 * bandwidth(cutoff) as usize + 1).next_power_of_two().max(4)
}

/// Smallest admissible grid on which products of two fields with this cutoff are exact
/// after truncation back to the cutoff (at least `3K + 1` points per axis).
pub fn dealias_grid(cutoff: u32) -> usize {
    (3 * bandwidth(cutoff) as usize + 1).next_power_of_two().max(4)
}

pub(crate) fn check_resolution(n: usize, required: usize) -> Result<()> {
    check_grid(n)?;
    if n < required {
        return Err(TorusError::Undersampled { n, required });
    }
    Ok(())
}

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub(crate) fn get(n: usize) -> Arc<Fft3> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("fft cache poisoned");
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let fft = if inverse { &self.inverse } else { &self.forward };
        // Contiguous axis.
        fft.process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for stride in [n, n * n] {
            for base in 0..n * n {
                let (outer, inner) = if stride == n {
                    (base / n * n * n, base % n)
                } else {
                    (0, base)
                };
                let start = outer + inner;
                for (t, v) in line.iter_mut().enumerate() {
                    *v = data[start + t * stride];
                }
                fft.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[start + t * stride] = *v;
                }
            }
        }
    }

    /// Places coefficients on the periodic index grid and sums the series at every node.
    pub(crate) fn synthesize(&self, u: &ScalarField) -> Vec<f64> {
        let n = self.n;
        let layout = u.layout();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n * n];
        let wrap = |c: i32| c.rem_euclid(n as i32) as usize;
        for (i, k) in layout.modes() {
            let c = u.raw()[i];
            if c.re != 0.0 || c.im != 0.0 {
                data[(wrap(k.0[0]) * n + wrap(k.0[1])) * n + wrap(k.0[2])] = c;
            }
        }
        self.run(&mut data, true);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Discrete Fourier coefficients of real samples, truncated to `cutoff` and symmetrised.
    pub(crate) fn analyze(&self, ell: f64, values: &[f64], cutoff: u32) -> ScalarField {
        let n = self.n;
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.run(&mut data, false);
        let norm = 1.0 / (n * n * n) as f64;
        let layout = Layout::new(cutoff);
        let mut out = ScalarField::zeros(ell, cutoff);
        let wrap = |c: i32| c.rem_euclid(n as i32) as usize;
        let raw = out.raw_mut();
        for (i, k) in layout.modes() {
            let m = k.neg();
            let a = data[(wrap(k.0[0]) * n + wrap(k.0[1])) * n + wrap(k.0[2])];
            let b = data[(wrap(m.0[0]) * n + wrap(m.0[1])) * n + wrap(m.0[2])];
            raw[i] = (a + b.conj()) * (0.5 * norm);
        }
        out
    }
}

/// Samples a scalar field on an `n³` grid.
pub fn synthesize(u: &ScalarField, n: usize) -> Result<SampledGrid> {
    check_resolution(n, 2 * u.k_max() as usize + 1)?;
    Ok(SampledGrid { ell: u.ell(), n, values: Fft3::get(n).synthesize(u) })
}

pub fn synthesize_vector(u: &VectorField, n: usize) -> Result<[SampledGrid; 3]> {
    Ok([
        synthesize(u.component(0), n)?,
        synthesize(u.component(1), n)?,
        synthesize(u.component(2), n)?,
    ])
}

/// Fourier coefficients of grid samples, truncated to the shell cutoff.
///
/// Exact inversion of [`synthesize`] whenever the grid resolves the cutoff.
pub fn analyze(grid: &SampledGrid, cutoff: u32) -> Result<ScalarField> {
    check_resolution(grid.n, 2 * bandwidth(cutoff) as usize + 1)?;
    Ok(Fft3::get(grid.n).analyze(grid.ell, &grid.values, cutoff))
}

/// `L^p(Q)` norm by the rectangle rule on an `n³` grid; `p = ∞` is the grid maximum.
///
/// For `p = 2` the rule is exact for band-limited fields; for other `p` it is a
/// quadrature approximation that improves with `n`.
pub fn lp_norm<F: SpectralField>(u: &F, p: f64, n: usize) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(TorusError::InvalidExponent(format!("L^p norm needs p >= 1, got {p}")));
    }
    let mags = u.magnitudes(n)?;
    Ok(lp_of_samples(&mags, u.ell(), n, p))
}

pub(crate) fn lp_of_samples(mags: &[f64], ell: f64, n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return mags.iter().copied().fold(0.0, f64::max);
    }
    let cell = (ell / n as f64).powi(3);
    let sum: f64 = if p == 2.0 {
        mags.iter().map(|v| v * v).sum()
    } else {
        mags.iter().map(|v| v.powf(p)).sum()
    };
    (cell * sum).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WaveVector;
    use std::f64::consts::PI;

    fn sine_x2(ell: f64, cutoff: u32) -> ScalarField {
        // sin(2π x2/ℓ): c_{(0,1,0)} = -i/2
        ScalarField::from_modes(ell, cutoff, [(WaveVector::new(0, 1, 0), Complex64::new(0.0, -0.5))])
            .unwrap()
    }

    #[test]
    fn constant_synthesizes_to_constant() {
        let u = ScalarField::constant(3.0, 4, 1.25);
        let g = synthesize(&u, 8).unwrap();
        assert!(g.values.iter().all(|&v| (v - 1.25).abs() < 1e-15));
    }

    #[test]
    fn sine_mode_matches_closed_form() {
        let ell = 2.5;
        let g = synthesize(&sine_x2(ell, 1), 8).unwrap();
        let expect = SampledGrid::from_fn(ell, 8, |_, y, _| (2.0 * PI * y / ell).sin()).unwrap();
        for (a, b) in g.values.iter().zip(&expect.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn undersampled_grid_rejected() {
        let u = ScalarField::zeros(1.0, 9);
        assert!(matches!(synthesize(&u, 4), Err(TorusError::Undersampled { .. })));
        assert!(matches!(synthesize(&u, 12), Err(TorusError::InvalidGrid(12))));
    }

    #[test]
    fn sup_norm_of_sine() {
        let ell = 2.0 * PI;
        let v = lp_norm(&sine_x2(ell, 1), f64::INFINITY, 64).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_vector_lp_norms() {
        let ell = 1.7;
        let u = VectorField::constant(ell, 2, [-2.0, 0.0, 0.0]);
        for p in [1.0, 1.5, 2.0, 3.0, 6.0] {
            let v = lp_norm(&u, p, 8).unwrap();
            let expect = 2.0 * ell.powf(3.0 / p);
            assert!((v - expect).abs() < 1e-12 * expect, "p={p}: {v} vs {expect}");
        }
        assert!((lp_norm(&u, f64::INFINITY, 8).unwrap() - 2.0).abs() < 1e-14);
        assert!(lp_norm(&u, 0.5, 8).is_err());
    }
}
