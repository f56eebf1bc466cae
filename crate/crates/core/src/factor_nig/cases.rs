//! Reference marginals (MSCI US IMI sector indices, NIG maximum-likelihood
//! estimates) and the CD/CS correlation scenarios.

use serde::{Deserialize, Serialize};

use super::correlation::{correlation, correlation_limits};
use super::model::{a_max, NigMarginal, RhoFactorModel};
use crate::error::Result;

/// `(index, gamma, beta, delta)`.
pub const MSCI_NIG_MARGINALS: [(&str, f64, f64, f64); 10] = [
    ("CD", 51.7708, -5.0441, 0.0112),
    ("CS", 108.3392, -12.8277, 0.0076),
    ("EN", 54.9486, -6.0927, 0.0155),
    ("FN", 22.7119, -1.7045, 0.0113),
    ("HC", 82.5935, -13.7078, 0.0090),
    ("IN", 45.0711, -5.2494, 0.0115),
    ("IT", 57.3094, -4.3395, 0.0114),
    ("MT", 54.3748, -7.4708, 0.0159),
    ("TC", 81.6045, -12.0085, 0.0101),
    ("UT", 97.9514, -7.5590, 0.0098),
];

pub fn msci_marginal(name: &str) -> Option<NigMarginal> {
    MSCI_NIG_MARGINALS
        .iter()
        .find(|m| m.0 == name)
        .map(|&(_, g, b, d)| NigMarginal { gamma: g, beta: b, delta: d })
}

/// How a scenario picks the common parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CommonParameter {
    Fixed(f64),
    /// `a_max - offset`.
    BelowMax(f64),
}

impl CommonParameter {
    pub fn resolve(self, marginals: &[NigMarginal]) -> f64 {
        match self {
            Self::Fixed(a) => a,
            Self::BelowMax(offset) => a_max(marginals) - offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub label: &'static str,
    pub a: CommonParameter,
    pub rho: f64,
    pub q: f64,
}

/// Correlated-Brownian scenarios. The `a = a_max` case is taken just inside
/// the open constraint.
pub const CORRELATED_SCENARIOS: [Scenario; 4] = [
    Scenario { label: "CASE1", a: CommonParameter::Fixed(0.5671), rho: 0.5, q: 0.5 },
    Scenario { label: "CASE2", a: CommonParameter::Fixed(0.5671), rho: -0.5, q: 1.5 },
    Scenario { label: "CASE3", a: CommonParameter::Fixed(0.2885), rho: 0.99, q: 1.5 },
    Scenario { label: "CASE4", a: CommonParameter::BelowMax(1e-9), rho: 0.99, q: 0.5 },
];

/// Independent-Brownian scenarios (`rho = 0`).
pub const INDEPENDENT_SCENARIOS: [Scenario; 4] = [
    Scenario { label: "CASE01", a: CommonParameter::Fixed(0.5671), rho: 0.0, q: 1.5 },
    Scenario { label: "CASE02", a: CommonParameter::Fixed(0.5671), rho: 0.0, q: 0.5 },
    Scenario { label: "CASE03", a: CommonParameter::Fixed(0.2885), rho: 0.0, q: 0.5 },
    Scenario { label: "CASE04", a: CommonParameter::Fixed(0.2885), rho: 0.0, q: 1.5 },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub a: f64,
    pub rho: f64,
    pub q: f64,
    pub limit_zero: f64,
    pub limit_infinity: f64,
    pub unit_time: f64,
}

impl Scenario {
    /// Bivariate model for this scenario on the given marginals.
    pub fn model(&self, first: NigMarginal, second: NigMarginal) -> Result<RhoFactorModel> {
        let a = self.a.resolve(&[first, second]);
        RhoFactorModel::bivariate(first, second, a, self.rho, self.q)
    }

    pub fn row(&self, first: NigMarginal, second: NigMarginal) -> Result<TableRow> {
        let model = self.model(first, second)?;
        let limits = correlation_limits(&model, 0, 1)?;
        Ok(TableRow {
            label: self.label.to_string(),
            a: model.a(),
            rho: self.rho,
            q: self.q,
            limit_zero: limits.limit_zero,
            limit_infinity: limits.limit_infinity,
            unit_time: correlation(&model, 1.0, 0, 1)?,
        })
    }
}

pub fn reproduce_table(
    scenarios: &[Scenario],
    first: NigMarginal,
    second: NigMarginal,
) -> Result<Vec<TableRow>> {
    scenarios.iter().map(|s| s.row(first, second)).collect()
}

/// Rounds to `digits` decimals, ties to even.
pub fn round_half_even(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    let y = x * scale;
    let floor = y.floor();
    let diff = y - floor;
    let r = if (diff - 0.5).abs() < 1e-9 {
        if floor % 2.0 == 0.0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        y.round()
    };
    r / scale
}
