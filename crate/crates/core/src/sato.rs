//! Sato subordinators built from exponential tempered stable laws.
//!
//! A valid base law has `alpha` in (0, 1) and all jump directions in the
//! closed positive orthant. The time-`t` law is the unit-time law scaled by
//! `t^q`. Drift is zero throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation, Violations};
use crate::etas::{EtasDistribution, UNIT_TOLERANCE};

#[derive(Serialize, Deserialize)]
pub(crate) struct RawSatoLaw {
    pub(crate) base: EtasDistribution,
    pub(crate) q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSatoLaw", into = "RawSatoLaw")]
pub struct SatoLaw {
    base: EtasDistribution,
    q: f64,
}

impl TryFrom<RawSatoLaw> for SatoLaw {
    type Error = Error;

    fn try_from(raw: RawSatoLaw) -> Result<Self> {
        make_sato(raw.base, raw.q)
    }
}

impl From<SatoLaw> for RawSatoLaw {
    fn from(law: SatoLaw) -> Self {
        Self {
            base: law.base,
            q: law.q,
        }
    }
}

/// Conditions for `dist` to be the unit-time law of a Sato subordinator with
/// exponent `q`.
pub fn sato_violations(dist: &EtasDistribution, q: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(dist.alpha() < 1.0) {
        out.push(Violation::AlphaNotInZeroOne(dist.alpha()));
    }
    for (index, atom) in dist.atoms().iter().enumerate() {
        if atom.direction.iter().any(|&x| x < -UNIT_TOLERANCE) {
            out.push(Violation::SupportNotPositiveOrthant { index });
        }
    }
    if !(q > 0.0 && q.is_finite()) {
        out.push(Violation::NonPositiveExponent(q));
    }
    out
}

pub fn make_sato(dist: EtasDistribution, q: f64) -> Result<SatoLaw> {
    Violations(sato_violations(&dist, q)).into_result(SatoLaw { base: dist, q })
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTime(t))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

impl SatoLaw {
    pub fn new(base: EtasDistribution, q: f64) -> Result<Self> {
        make_sato(base, q)
    }

    pub fn base(&self) -> &EtasDistribution {
        &self.base
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Characteristic exponent of the time-`t` law, `psi(t^q z)`.
    pub fn char_exponent(&self, t: f64, z: &[f64]) -> Result<Complex64> {
        check_time(t)?;
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let s = t.powf(self.q);
        let scaled: Vec<f64> = z.iter().map(|x| x * s).collect();
        Ok(self.base.char_exponent(&scaled))
    }

    /// Characteristic function of the time-`t` law, `phi(t^q z)`.
    pub fn cf(&self, t: f64, z: &[f64]) -> Result<Complex64> {
        Ok(self.char_exponent(t, z)?.exp())
    }

    /// Radial Lévy density of the time-`t` law along atom `atom_index`:
    /// `lambda_w t^(alpha q) exp(-beta_w r t^-q) / r^(alpha + 1)`.
    pub fn time_t_levy_radial(&self, t: f64, atom_index: usize, r: f64) -> Result<f64> {
        check_time(t)?;
        check_radius(r)?;
        let atom = self.base.atom(atom_index)?;
        let alpha = self.base.alpha();
        let tq = t.powf(self.q);
        Ok(atom.mass * tq.powf(alpha) * (-atom.tempering * r / tq).exp() / r.powf(alpha + 1.0))
    }

    /// Time derivative of [`Self::time_t_levy_radial`] at time `u`:
    /// `lambda_w exp(-beta_w r u^-q) q u^(alpha q - 1) (beta_w r u^-q + alpha) / r^(alpha + 1)`.
    pub fn differential_levy_radial(&self, u: f64, atom_index: usize, r: f64) -> Result<f64> {
        check_time(u)?;
        check_radius(r)?;
        let atom = self.base.atom(atom_index)?;
        let alpha = self.base.alpha();
        let scaled = atom.tempering * r * u.powf(-self.q);
        Ok(atom.mass * (-scaled).exp() * self.q * u.powf(alpha * self.q - 1.0) * (scaled + alpha)
            / r.powf(alpha + 1.0))
    }
}
