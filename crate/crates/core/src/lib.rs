//! Fourier-Galerkin engine for the incompressible Navier-Stokes equations on the periodic
//! 3-torus `(0, ℓ)³`, with evaluators for the energy estimates, Gronwall-type bounds and
//! Ladyzhenskaya-Prodi-Serrin norms of computed trajectories.

pub mod eigenbasis;
pub mod error;
pub mod estimates;
pub mod expm;
pub mod galerkin;
pub mod helmholtz;
pub mod io;
pub mod problems;
pub mod sample;
pub mod spectral;

pub use error::{Result, TorusError};
pub use spectral::{ScalarField, VectorField, WaveVector};
