use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{chunk_rng, sample_subordinator_at, sample_y_rho_at, McConfig};
use super::stats::{empirical_cf, empirical_correlation, empirical_mean, empirical_variance, Estimate};
use crate::error::Result;
use crate::factor_nig::{correlation, correlation_limits, nig_model_cf, RhoFactorModel};

/// Agreement threshold in standard errors.
pub const SE_THRESHOLD: f64 = 4.0;

/// Number of random characteristic-function arguments per horizon.
pub const CF_POINTS: usize = 5;

// Stream id for the CF argument generator, far above any chunk index.
const ARGUMENT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub name: String,
    pub t: f64,
    pub estimate: f64,
    pub standard_error: f64,
    pub reference: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub seed: u64,
    pub sample_count: usize,
    pub se_threshold: f64,
    pub checks: Vec<McCheck>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &McCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn within(estimate: &Estimate, reference: f64) -> bool {
    let gap = (estimate.value - reference).abs();
    if estimate.se > 0.0 {
        gap <= SE_THRESHOLD * estimate.se
    } else {
        gap <= 1e-12 * reference.abs().max(1.0)
    }
}

fn check(name: String, t: f64, estimate: Estimate, reference: f64) -> McCheck {
    McCheck {
        passed: within(&estimate, reference),
        name,
        t,
        estimate: estimate.value,
        standard_error: estimate.se,
        reference,
    }
}

/// Random arguments scaled by the per-coordinate standard deviations so that
/// the characteristic function is far from both 1 and 0.
fn cf_arguments(seed: u64, t_index: usize, scales: &[f64]) -> Vec<Vec<f64>> {
    let mut rng = chunk_rng(seed ^ (t_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15), ARGUMENT_STREAM);
    (0..CF_POINTS)
        .map(|_| scales.iter().map(|s| rng.random_range(-2.0..2.0) / s).collect())
        .collect()
}

/// Compares Monte Carlo draws of `S(t)` and `Y(t)` with the closed forms at
/// each horizon: moments of both, subordinator and return correlations, and
/// characteristic functions.
pub fn run_model_checks(model: &RhoFactorModel, times: &[f64], config: &McConfig) -> Result<McReport> {
    let d = model.dim();
    let subordinator = model.subordinator()?;
    let moments = model.subordinator_moments();
    let mut checks = Vec::new();
    for (ti, &t) in times.iter().enumerate() {
        let tq = t.powf(model.q());
        let s = sample_subordinator_at(model, t, config)?;
        for j in 0..d {
            checks.push(check(format!("E[S_{j}]"), t, empirical_mean(&s, j)?, tq * moments.total[j].mean));
            checks.push(check(
                format!("V[S_{j}]"),
                t,
                empirical_variance(&s, j)?,
                tq * tq * moments.total[j].variance,
            ));
        }
        let scales: Vec<f64> = moments.total.iter().map(|m| tq * m.variance.sqrt()).collect();
        for (k, z) in cf_arguments(config.seed, 2 * ti, &scales).iter().enumerate() {
            let cf = empirical_cf(&s, z)?;
            let exact = subordinator.cf(t, z)?;
            checks.push(check(format!("Re cf_S #{k}"), t, Estimate { value: cf.value.re, se: cf.se_re }, exact.re));
            checks.push(check(format!("Im cf_S #{k}"), t, Estimate { value: cf.value.im, se: cf.se_im }, exact.im));
        }
        drop(s);

        let y = sample_y_rho_at(model, t, config)?;
        let ret = model.return_moments(t)?;
        for j in 0..d {
            checks.push(check(format!("E[Y_{j}]"), t, empirical_mean(&y, j)?, ret[j].mean));
            checks.push(check(format!("V[Y_{j}]"), t, empirical_variance(&y, j)?, ret[j].variance));
        }
        let y_scales: Vec<f64> = ret.iter().map(|m| m.variance.sqrt()).collect();
        for (k, z) in cf_arguments(config.seed, 2 * ti + 1, &y_scales).iter().enumerate() {
            let cf = empirical_cf(&y, z)?;
            let exact = nig_model_cf(model, t, z)?;
            checks.push(check(format!("Re cf_Y #{k}"), t, Estimate { value: cf.value.re, se: cf.se_re }, exact.re));
            checks.push(check(format!("Im cf_Y #{k}"), t, Estimate { value: cf.value.im, se: cf.se_im }, exact.im));
        }
        for h in 0..d {
            for j in h + 1..d {
                checks.push(check(
                    format!("corr(Y_{h},Y_{j})"),
                    t,
                    empirical_correlation(&y, h, j)?,
                    correlation(model, t, h, j)?,
                ));
            }
        }
        drop(y);
        let s = sample_subordinator_at(model, t, config)?;
        for h in 0..d {
            for j in h + 1..d {
                checks.push(check(
                    format!("corr(S_{h},S_{j})"),
                    t,
                    empirical_correlation(&s, h, j)?,
                    correlation_limits(model, h, j)?.limit_infinity,
                ));
            }
        }
    }
    Ok(McReport {
        seed: config.seed,
        sample_count: config.sample_count,
        se_threshold: SE_THRESHOLD,
        checks,
    })
}
