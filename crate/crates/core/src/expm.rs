//! Dense matrix exponential by scaling and squaring of a truncated Taylor series.

use nalgebra::{DMatrix, DVector};

/// Relative size below which further Taylor terms are dropped.
const TAYLOR_TOL: f64 = 1e-17;

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A)` for a square matrix.
///
/// `A` is scaled by `2^{-s}` until its 1-norm is at most 1/2, the Taylor series
/// `Σ X^k/k!` is summed until the next term falls below `1e-17` of the partial sum, and
/// the result is squared `s` times.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "matrix exponential needs a square matrix");
    let n = a.nrows();
    let norm = norm1(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let x = a / 2f64.powi(s);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..64 {
        term = &term * &x / k as f64;
        sum += &term;
        if norm1(&term) <= TAYLOR_TOL * norm1(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Solution at time `t` of `c' + A c = f`, `c(0) = c0`, with constant `A` and `f`:
///
/// `c(t) = exp(-tA) c0 + ∫_0^t exp(-(t-s)A) f ds`,
///
/// read off the exponential of the augmented matrix `[[-tA, t f], [0, 0]]`.
pub fn autonomous_solution(a: &DMatrix<f64>, c0: &DVector<f64>, f: &DVector<f64>, t: f64) -> DVector<f64> {
    let n = a.nrows();
    let mut aug = DMatrix::<f64>::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * -t));
    aug.view_mut((0, n), (n, 1)).copy_from(&(f * t));
    let e = expm(&aug);
    let prop = e.view((0, 0), (n, n));
    let forced = e.view((0, n), (n, 1));
    prop * c0 + forced.column(0)
}
