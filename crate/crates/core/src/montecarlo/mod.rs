//! Seeded, chunk-parallel simulation of the factor subordinator and the
//! subordinated returns, with estimators and closed-form checks.

mod check;
mod sampling;
mod stats;

pub use check::{run_model_checks, McCheck, McReport, CF_POINTS, SE_THRESHOLD};
pub use sampling::{
    chunk_rng, generate, psd_factor, sample_ig, sample_subordinator_at, sample_y_rho_at,
    InverseGaussian, McConfig, SampleMatrix, CHUNK_ROWS,
};
pub use stats::{
    empirical_cf, empirical_correlation, empirical_mean, empirical_variance, CfEstimate, Estimate,
};
