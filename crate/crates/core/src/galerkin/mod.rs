//! Faedo-Galerkin systems in the span of the shells `(k,k) <= M`: the problem linearised
//! around a drift `w` in matrix form, and the full Navier-Stokes evolution.

mod analysis;
mod config;
mod linearized;
mod navier_stokes;
mod stepper;
mod trajectory;

pub use analysis::{cumulative_trapezoid, energy_defect, recover_pressures, residual};
pub use config::{Scheme, SolverConfig};
pub use linearized::{assemble_linearized, solve_linearized, LinearizedOperator, LinearizedSolution};
pub use navier_stokes::solve_navier_stokes;
pub use trajectory::{FieldTrajectory, Forcing, ForcingFn, ZeroForcing};
