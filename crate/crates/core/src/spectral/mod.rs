//! Truncated Fourier representation of periodic fields on the torus and the operations on it.

mod field;
pub mod grid;
pub mod nonlinear;
pub mod ops;
mod wave;

pub use field::{ScalarField, SpectralField, VectorField};
pub use grid::{analyze, dealias_grid, lp_norm, min_grid, synthesize, synthesize_vector, SampledGrid};
pub use nonlinear::{bilinear_b, convect, convect_on, nonlinear_d, product};
pub use ops::{
    base_wavenumber, derivative, derivative_vector, div, grad, gradient_norm, hs_norm, inner_l2,
    inner_l2_scalar, l2_norm_exact, laplace_eigenvalue, laplacian, neg_laplacian_pow, rot,
    sobolev_norm,
};
pub use wave::{bandwidth, WaveVector};
pub(crate) use field::check_shapes;
pub(crate) use grid::Fft3;
