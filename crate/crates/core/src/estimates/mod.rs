//! Evaluators for the a priori estimates on computed trajectories.

mod bochner;
mod diagnostics;
mod energy;
mod lps;
mod perov;

pub use bochner::{bochner_scale_norm, multi_indices, time_jets, BochnerScaleNorm, Evolution, ForcingJet};
pub use diagnostics::{
    gn_report, max_partial_lp, nonlinear_term_bound_report, partial, GnExponents, GnReport,
    NonlinearBoundReport,
};
pub use energy::{certificate_factor, drift_integral, energy_certificate, time_lp_of_l2, EnergyCertificate};
pub use lps::{lps_admissible, lps_norm, LpsReport};
pub use perov::{perov_bound, PerovInput};
