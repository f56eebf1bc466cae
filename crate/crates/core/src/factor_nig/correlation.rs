//! Time-varying linear correlation of the subordinated returns.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::model::{check_time, RhoFactorModel};
use crate::error::{Error, Result};

fn check_pair(model: &RhoFactorModel, h: usize, j: usize) -> Result<()> {
    if h == j || h >= model.dim() || j >= model.dim() {
        return Err(Error::InvalidPair { h, j, dim: model.dim() });
    }
    Ok(())
}

/// `Corr(Y_h(t), Y_j(t))`:
///
/// `(rho_hj s_h s_j sqrt(a_h a_j) t^q E[Z] + mu_h mu_j a_h a_j t^2q V[Z])
///  / sqrt(prod_k (s_k^2 t^q E[S_k] + mu_k^2 t^2q V[S_k]))`.
pub fn correlation(model: &RhoFactorModel, t: f64, h: usize, j: usize) -> Result<f64> {
    check_time(t)?;
    check_pair(model, h, j)?;
    let tq = t.powf(model.q());
    let s = model.subordinator_moments();
    let (mh, mj) = (&model.marginals()[h], &model.marginals()[j]);
    let (ah, aj) = (mh.loading(), mj.loading());
    let num = model.rho()[(h, j)] * mh.vol() * mj.vol() * (ah * aj).sqrt() * tq * s.common.mean
        + mh.drift() * mj.drift() * ah * aj * tq * tq * s.common.variance;
    let var = |m: &super::NigMarginal, k: usize| {
        m.vol().powi(2) * tq * s.total[k].mean + m.drift().powi(2) * tq * tq * s.total[k].variance
    };
    Ok((num / (var(mh, h) * var(mj, j)).sqrt()).clamp(-1.0, 1.0))
}

/// Analytic limits of the correlation as `t -> 0` and `t -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationLimits {
    pub limit_zero: f64,
    pub limit_infinity: f64,
}

/// As `t -> 0` the diffusion terms dominate and the correlation tends to
/// `rho_hj sqrt(a_h a_j) E[Z] / sqrt(E[S_h] E[S_j]) = rho_hj a / sqrt(zeta_h zeta_j)`;
/// as `t -> infinity` it tends to the subordinator correlation
/// `Corr(S_h, S_j) = a / sqrt(zeta_h zeta_j)`.
pub fn correlation_limits(model: &RhoFactorModel, h: usize, j: usize) -> Result<CorrelationLimits> {
    check_pair(model, h, j)?;
    let s = model.subordinator_moments();
    let (ah, aj) = (model.marginals()[h].loading(), model.marginals()[j].loading());
    let limit_zero = model.rho()[(h, j)] * (ah * aj).sqrt() * s.common.mean
        / (s.total[h].mean * s.total[j].mean).sqrt();
    let limit_infinity =
        ah * aj * s.common.variance / (s.total[h].variance * s.total[j].variance).sqrt();
    Ok(CorrelationLimits {
        limit_zero,
        limit_infinity,
    })
}

/// Correlation of the constant-correlation Lévy baseline: the unit-time
/// value at every horizon.
pub fn baseline_levy_correlation(model: &RhoFactorModel, h: usize, j: usize) -> Result<f64> {
    correlation(model, 1.0, h, j)
}

/// Correlation of the marginal Sato-NIG baseline. Per-coordinate Sato
/// exponents only rescale time coordinate-wise, so `exponents` has no effect
/// on the value.
pub fn baseline_sato_nig_correlation(
    model: &RhoFactorModel,
    h: usize,
    j: usize,
    exponents: &[f64],
) -> Result<f64> {
    if exponents.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameters("Sato exponents must be positive".into()));
    }
    correlation(model, 1.0, h, j)
}

/// `points` times from `t_min` to `t_max`, log-spaced unless `linear`.
pub fn time_grid(t_min: f64, t_max: f64, points: usize, linear: bool) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParameters(format!("need at least 2 grid points, got {points}")));
    }
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidGrid);
    }
    let n = (points - 1) as f64;
    let grid = (0..points)
        .map(|i| {
            let f = i as f64 / n;
            if i == 0 {
                t_min
            } else if i == points - 1 {
                t_max
            } else if linear {
                t_min + f * (t_max - t_min)
            } else {
                (t_min.ln() + f * (t_max.ln() - t_min.ln())).exp()
            }
        })
        .collect();
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub pair: (usize, usize),
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub limit_zero: f64,
    pub limit_infinity: f64,
}

pub fn correlation_curve(
    model: &RhoFactorModel,
    h: usize,
    j: usize,
    times: &[f64],
) -> Result<CorrelationCurve> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if times[0] <= 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid);
    }
    let limits = correlation_limits(model, h, j)?;
    let values = times
        .iter()
        .map(|&t| correlation(model, t, h, j))
        .collect::<Result<_>>()?;
    Ok(CorrelationCurve {
        pair: (h, j),
        times: times.to_vec(),
        values,
        limit_zero: limits.limit_zero,
        limit_infinity: limits.limit_infinity,
    })
}

impl CorrelationCurve {
    /// `t,rho_hj` rows, then comment lines with the pair and both limits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho_hj\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{t},{v}").unwrap();
        }
        writeln!(out, "# pair={},{}", self.pair.0, self.pair.1).unwrap();
        writeln!(out, "# limit_zero={}", self.limit_zero).unwrap();
        writeln!(out, "# limit_infinity={}", self.limit_infinity).unwrap();
        out
    }
}

/// Reads the `(t, rho)` rows of a curve CSV, skipping the header and comments.
pub fn parse_curve_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let bad = |line: &str| Error::InvalidParameters(format!("malformed curve row: {line}"));
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let (t, v) = line.split_once(',').ok_or_else(|| bad(line))?;
            Ok((
                t.trim().parse().map_err(|_| bad(line))?,
                v.trim().parse().map_err(|_| bad(line))?,
            ))
        })
        .collect()
}
