//! Quadratic terms evaluated pseudo-spectrally on a zero-padded grid.
//!
//! Factors are differentiated in coefficient space, multiplied on a grid with at least
//! `3K + 1` points per axis, and analysed back to the common cutoff. On such grids the
//! aliases of the product never reach the retained modes, so the result is the exact
//! Galerkin truncation of the product.

use super::field::{check_shapes, ScalarField, VectorField};
use super::grid::{check_resolution, dealias_grid, Fft3};
use super::ops::derivative;
use crate::error::Result;

fn required(cutoff: u32) -> usize {
    3 * super::wave::bandwidth(cutoff) as usize + 1
}

/// Truncation of the pointwise product `a · b` to the common cutoff.
pub fn product(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    check_shapes(a.ell(), a.cutoff(), b.ell(), b.cutoff())?;
    let n = dealias_grid(a.cutoff());
    let fft = Fft3::get(n);
    let ga = fft.synthesize(a);
    let gb = fft.synthesize(b);
    let prod: Vec<f64> = ga.iter().zip(&gb).map(|(x, y)| x * y).collect();
    Ok(fft.analyze(a.ell(), &prod, a.cutoff()))
}

/// `(w·∇)u`, truncated to the cutoff.
pub fn convect(w: &VectorField, u: &VectorField) -> Result<VectorField> {
    convect_on(w, u, dealias_grid(w.cutoff()))
}

/// [`convect`] on an explicit grid of `n` points per axis (`n >= 3K + 1`, power of two).
pub fn convect_on(w: &VectorField, u: &VectorField, n: usize) -> Result<VectorField> {
    check_shapes(w.ell(), w.cutoff(), u.ell(), u.cutoff())?;
    check_resolution(n, required(w.cutoff()))?;
    let fft = Fft3::get(n);
    let wg: Vec<Vec<f64>> = w.components().iter().map(|c| fft.synthesize(c)).collect();
    let mut out = Vec::with_capacity(3);
    for ui in u.components() {
        let mut acc = vec![0.0; n * n * n];
        for (j, wj) in wg.iter().enumerate() {
            let d = fft.synthesize(&derivative(ui, j));
            for ((a, x), y) in acc.iter_mut().zip(wj).zip(&d) {
                *a += x * y;
            }
        }
        out.push(fft.analyze(u.ell(), &acc, u.cutoff()));
    }
    let [a, b, c]: [ScalarField; 3] = out.try_into().expect("three components");
    VectorField::from_components([a, b, c])
}

/// `𝐃u = Σ_j u^j ∂_j u`.
pub fn nonlinear_d(u: &VectorField) -> Result<VectorField> {
    convect(u, u)
}

/// `𝐁(w,u) = (w·∇)u + (u·∇)w`.
pub fn bilinear_b(w: &VectorField, u: &VectorField) -> Result<VectorField> {
    let mut out = convect(w, u)?;
    out += &convect(u, w)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::TorusError;
    use crate::spectral::WaveVector;
    use num_complex::Complex64;

    #[test]
    fn constant_field_has_no_self_transport() {
        let u = VectorField::constant(2.0, 4, [1.0, -2.0, 0.5]);
        assert!(nonlinear_d(&u).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn shear_field_has_no_self_transport() {
        let mut u = VectorField::zeros(2.0, 4);
        u.component_mut(0)
            .set_coeff(WaveVector::new(0, 1, 0), Complex64::new(0.0, -0.5))
            .unwrap();
        assert!(nonlinear_d(&u).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn b_of_equal_arguments_doubles_d() {
        let mut u = VectorField::zeros(1.0, 3);
        u.set_coeff(
            WaveVector::new(1, 1, 0),
            [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.3)],
        )
        .unwrap();
        let d = nonlinear_d(&u).unwrap();
        let b = bilinear_b(&u, &u).unwrap();
        assert_eq!(b, d.scaled(2.0));
    }

    #[test]
    fn mismatched_cutoffs_rejected() {
        let a = VectorField::zeros(1.0, 3);
        let b = VectorField::zeros(1.0, 4);
        assert!(matches!(convect(&a, &b), Err(TorusError::CutoffMismatch { .. })));
        assert!(matches!(convect_on(&b, &b, 4), Err(TorusError::Undersampled { .. })));
    }
}
