//! The factor-based Sato-IG subordinated Brownian motion with NIG marginals.
//!
//! The subordinator has components `S_j = X_j + a_j Z` with
//! `X_j ~ IG(1 - a / zeta_j, zeta_j)` and `Z ~ IG(a, 1)`, where
//! `a_j = 1 / zeta_j^2` and `zeta_j = delta_j sqrt(gamma_j^2 - beta_j^2)`.
//! `X_j` drives an independent Brownian motion with drift `beta_j delta_j^2`
//! and volatility `delta_j`; `Z` drives a correlated motion with drift
//! `mu_j a_j` and covariance `rho_ij sigma_i sigma_j sqrt(a_i a_j)`.
//! Each coordinate then has an NIG(gamma_j, beta_j, delta_j) law at unit time.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::factor::{
    build_factor_distribution, subordinated_bm_cf, BrownianComponent, FactorSubordinatorSpec,
    MultiParamBrownian, TemperedComponent,
};
use crate::error::{Error, Result, Violation, Violations};
use crate::etas::{Atom, EtasDistribution};
use crate::sato::{make_sato, SatoLaw};

const RHO_SYMMETRY_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = -1e-10;

/// Characteristic function of `IG(a, b)`: `exp(-a (sqrt(b^2 - 2iu) - b))`.
pub fn ig_cf(a: f64, b: f64, u: f64) -> Complex64 {
    assert!(a > 0.0 && b > 0.0, "IG parameters must be positive");
    ig_log_laplace(a, b, Complex64::new(0.0, u)).exp()
}

/// `log E[exp(s X)]` for `X ~ IG(a, b)` and `Re s <= 0`, principal square root.
pub fn ig_log_laplace(a: f64, b: f64, s: Complex64) -> Complex64 {
    -((Complex64::new(b * b, 0.0) - s * 2.0).sqrt() - b) * a
}

/// Parameters of the exponential tempered stable law equal to `IG(a, b)`:
/// `alpha = 1/2`, `beta = b^2 / 2`, `lambda = a / sqrt(2 pi)`.
pub fn ig_as_tempered(a: f64, b: f64) -> TemperedComponent {
    TemperedComponent {
        beta: 0.5 * b * b,
        lambda: a / (2.0 * PI).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigMarginal {
    pub gamma: f64,
    pub beta: f64,
    pub delta: f64,
}

impl NigMarginal {
    pub fn new(gamma: f64, beta: f64, delta: f64) -> Result<Self> {
        let m = Self { gamma, beta, delta };
        Violations(m.violations(0)).into_result(m)
    }

    pub fn violations(&self, index: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            out.push(Violation::NonPositiveGamma { index, value: self.gamma });
        }
        if !(self.beta.abs() < self.gamma) {
            out.push(Violation::SkewOutOfRange {
                index,
                beta: self.beta,
                gamma: self.gamma,
            });
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            out.push(Violation::NonPositiveDelta { index, value: self.delta });
        }
        out
    }

    /// `delta sqrt(gamma^2 - beta^2)`.
    pub fn zeta(&self) -> f64 {
        self.delta * (self.gamma * self.gamma - self.beta * self.beta).sqrt()
    }

    /// Factor loading `a_j = 1 / zeta^2`.
    pub fn loading(&self) -> f64 {
        self.zeta().powi(-2)
    }

    /// Brownian drift `beta delta^2`.
    pub fn drift(&self) -> f64 {
        self.beta * self.delta * self.delta
    }

    /// Brownian volatility `delta`.
    pub fn vol(&self) -> f64 {
        self.delta
    }
}

/// Upper bound on the common parameter: `min_j zeta_j`.
pub fn a_max(marginals: &[NigMarginal]) -> f64 {
    marginals.iter().map(NigMarginal::zeta).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanVariance {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorMoments {
    /// `X_j` at unit time.
    pub idiosyncratic: Vec<MeanVariance>,
    /// `S_j = X_j + a_j Z` at unit time.
    pub total: Vec<MeanVariance>,
    /// `Z` at unit time.
    pub common: MeanVariance,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RawModel {
    pub(crate) marginals: Vec<NigMarginal>,
    pub(crate) a: f64,
    pub(crate) rho: Vec<Vec<f64>>,
    pub(crate) q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct RhoFactorModel {
    marginals: Vec<NigMarginal>,
    a: f64,
    rho: DMatrix<f64>,
    q: f64,
}

impl TryFrom<RawModel> for RhoFactorModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        let rho = rho_from_rows(&raw.rho, raw.marginals.len())
            .map_err(|v| Error::Invalid(Violations(vec![v])))?;
        Self::new(raw.marginals, raw.a, rho, raw.q)
    }
}

/// Matrix from row vectors; ragged input is a shape violation.
pub(crate) fn rho_from_rows(rows: &[Vec<f64>], expected: usize) -> std::result::Result<DMatrix<f64>, Violation> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Violation::RhoShape {
            expected,
            rows: rows.len(),
            cols: rows.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

impl From<RhoFactorModel> for RawModel {
    fn from(m: RhoFactorModel) -> Self {
        let rho = m
            .rho
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        Self {
            marginals: m.marginals,
            a: m.a,
            rho,
            q: m.q,
        }
    }
}

/// Every constraint the model parameters break.
pub fn model_violations(marginals: &[NigMarginal], a: f64, rho: &DMatrix<f64>, q: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if marginals.is_empty() {
        out.push(Violation::NoMarginals);
    }
    let mut marginals_ok = true;
    for (index, m) in marginals.iter().enumerate() {
        let v = m.violations(index);
        marginals_ok &= v.is_empty();
        out.extend(v);
    }
    if marginals_ok && !marginals.is_empty() {
        let a_max = a_max(marginals);
        if !(a > 0.0 && a < a_max) {
            out.push(Violation::CommonParameterOutOfRange { a, a_max });
        }
    }
    let d = marginals.len();
    if rho.nrows() != d || rho.ncols() != d {
        out.push(Violation::RhoShape {
            expected: d,
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    } else if d > 0 {
        let mut symmetric = true;
        for i in 0..d {
            if rho[(i, i)] != 1.0 {
                out.push(Violation::RhoDiagonal { index: i, value: rho[(i, i)] });
            }
            for j in 0..d {
                let v = rho[(i, j)];
                if !(v.abs() <= 1.0) {
                    out.push(Violation::RhoEntryOutOfRange { row: i, col: j, value: v });
                }
                if j > i && (v - rho[(j, i)]).abs() > RHO_SYMMETRY_TOLERANCE {
                    symmetric = false;
                    out.push(Violation::RhoNotSymmetric { row: i, col: j });
                }
            }
        }
        if symmetric && rho.iter().all(|x| x.is_finite()) {
            let min = SymmetricEigen::new(rho.clone()).eigenvalues.min();
            if min < PSD_TOLERANCE {
                out.push(Violation::RhoNotPsd { min_eigenvalue: min });
            }
        }
    }
    if !(q > 0.0 && q.is_finite()) {
        out.push(Violation::NonPositiveExponent(q));
    }
    out
}

impl RhoFactorModel {
    pub fn new(marginals: Vec<NigMarginal>, a: f64, rho: DMatrix<f64>, q: f64) -> Result<Self> {
        Violations(model_violations(&marginals, a, &rho, q)).into_result(Self {
            marginals,
            a,
            rho,
            q,
        })
    }

    /// Two assets with Brownian correlation `rho`.
    pub fn bivariate(first: NigMarginal, second: NigMarginal, a: f64, rho: f64, q: f64) -> Result<Self> {
        Self::new(
            vec![first, second],
            a,
            DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]),
            q,
        )
    }

    /// Same marginals, new common parameters.
    pub fn with_common(&self, a: f64, rho: DMatrix<f64>, q: f64) -> Result<Self> {
        Self::new(self.marginals.clone(), a, rho, q)
    }

    pub fn marginals(&self) -> &[NigMarginal] {
        &self.marginals
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn rho(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn zetas(&self) -> Vec<f64> {
        self.marginals.iter().map(NigMarginal::zeta).collect()
    }

    pub fn loadings(&self) -> Vec<f64> {
        self.marginals.iter().map(NigMarginal::loading).collect()
    }

    pub fn drifts(&self) -> Vec<f64> {
        self.marginals.iter().map(NigMarginal::drift).collect()
    }

    pub fn vols(&self) -> Vec<f64> {
        self.marginals.iter().map(NigMarginal::vol).collect()
    }

    /// `(shape, rate)` of `X_j ~ IG(1 - a / zeta_j, zeta_j)`.
    pub fn idiosyncratic_ig(&self, j: usize) -> (f64, f64) {
        let zeta = self.marginals[j].zeta();
        (1.0 - self.a / zeta, zeta)
    }

    /// `(shape, rate)` of `Z ~ IG(a, 1)`.
    pub fn common_ig(&self) -> (f64, f64) {
        (self.a, 1.0)
    }

    /// Drift `mu_j a_j` of the common-factor Brownian motion.
    pub fn common_drift(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.marginals.iter().map(|m| m.drift() * m.loading()))
    }

    /// Covariance `rho_ij sigma_i sigma_j sqrt(a_i a_j)` of the common-factor
    /// Brownian motion.
    pub fn common_covariance(&self) -> DMatrix<f64> {
        let s: Vec<f64> = self
            .marginals
            .iter()
            .map(|m| m.vol() * m.loading().sqrt())
            .collect();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.rho[(i, j)] * s[i] * s[j])
    }

    /// The `d`-dimensional factor subordinator in tempered stable form.
    pub fn factor_spec(&self) -> FactorSubordinatorSpec {
        let (a, b) = self.common_ig();
        FactorSubordinatorSpec {
            alpha: 0.5,
            idiosyncratic: (0..self.dim())
                .map(|j| {
                    let (k, b) = self.idiosyncratic_ig(j);
                    ig_as_tempered(k, b)
                })
                .collect(),
            common: ig_as_tempered(a, b),
            loadings: self.loadings(),
        }
    }

    /// Sato subordinator `S(t)` with components `S_j = X_j + a_j Z`.
    pub fn subordinator(&self) -> Result<SatoLaw> {
        make_sato(build_factor_distribution(&self.factor_spec())?, self.q)
    }

    /// Sato subordinator `(X_1, ..., X_d, Z)` in `R^(d+1)` with independent
    /// components.
    pub fn extended_subordinator(&self) -> Result<SatoLaw> {
        let spec = self.factor_spec();
        let n = self.dim() + 1;
        let atoms = spec
            .idiosyncratic
            .iter()
            .chain(std::iter::once(&spec.common))
            .enumerate()
            .map(|(k, c)| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                Atom::new(e, c.beta, c.lambda)
            })
            .collect();
        make_sato(EtasDistribution::new(0.5, atoms)?, self.q)
    }

    /// Brownian motions driven by `(X_1, ..., X_d, Z)`.
    pub fn brownian(&self) -> MultiParamBrownian {
        let mut components = MultiParamBrownian::independent(&self.drifts(), &self.vols())
            .expect("matching lengths")
            .components()
            .to_vec();
        components.push(BrownianComponent {
            drift: self.common_drift(),
            covariance: self.common_covariance(),
        });
        MultiParamBrownian::new(components).expect("consistent dimensions")
    }

    /// Unit-time moments of the subordinator components.
    pub fn subordinator_moments(&self) -> SubordinatorMoments {
        // IG(k, b): mean k / b, variance k / b^3
        let ig = |k: f64, b: f64| MeanVariance {
            mean: k / b,
            variance: k / (b * b * b),
        };
        let common = ig(self.a, 1.0);
        let idiosyncratic: Vec<MeanVariance> = (0..self.dim())
            .map(|j| {
                let (k, b) = self.idiosyncratic_ig(j);
                ig(k, b)
            })
            .collect();
        let total = idiosyncratic
            .iter()
            .zip(self.loadings())
            .map(|(x, aj)| MeanVariance {
                mean: x.mean + aj * common.mean,
                variance: x.variance + aj * aj * common.variance,
            })
            .collect();
        SubordinatorMoments {
            idiosyncratic,
            total,
            common,
        }
    }

    /// Mean and variance of each return coordinate `Y_j(t)`.
    pub fn return_moments(&self, t: f64) -> Result<Vec<MeanVariance>> {
        check_time(t)?;
        let tq = t.powf(self.q);
        let s = self.subordinator_moments();
        Ok(self
            .marginals
            .iter()
            .zip(&s.total)
            .map(|(m, sj)| MeanVariance {
                mean: m.drift() * tq * sj.mean,
                variance: m.vol().powi(2) * tq * sj.mean + m.drift().powi(2) * tq * tq * sj.variance,
            })
            .collect())
    }

    /// Closed-form characteristic function of `Y(t)`.
    pub fn cf(&self, t: f64, z: &[f64]) -> Result<Complex64> {
        nig_model_cf(self, t, z)
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTime(t))
    }
}

/// Characteristic function of `Y(t)` written directly in the NIG
/// parameters:
///
/// `exp{ -sum_j (1 - a/zeta_j)(sqrt(zeta_j^2 - 2 t^q psi_j) - zeta_j)
///       - a (sqrt(1 - 2 t^q psi_Z) - 1) }`
///
/// with `psi_j = i beta_j delta_j^2 u_j - delta_j^2 u_j^2 / 2` and
/// `psi_Z = i u'mu^rho - u'Sigma^rho u / 2`.
pub fn nig_model_cf(model: &RhoFactorModel, t: f64, z: &[f64]) -> Result<Complex64> {
    check_time(t)?;
    if z.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: z.len(),
        });
    }
    let tq = t.powf(model.q);
    let mut exponent = Complex64::new(0.0, 0.0);
    for (j, (m, &u)) in model.marginals.iter().zip(z).enumerate() {
        let psi = Complex64::new(-0.5 * m.delta * m.delta * u * u, m.drift() * u);
        let (k, zeta) = model.idiosyncratic_ig(j);
        exponent += ig_log_laplace(k, zeta, psi * tq);
    }
    let zv = DVector::from_column_slice(z);
    let psi_common = Complex64::new(
        -0.5 * zv.dot(&(model.common_covariance() * &zv)),
        zv.dot(&model.common_drift()),
    );
    exponent += ig_log_laplace(model.a, 1.0, psi_common * tq);
    Ok(exponent.exp())
}

/// Characteristic function of `Y(t)` through the generic subordination
/// route on the extended subordinator `(X, Z)`.
pub fn subordinated_model_cf(model: &RhoFactorModel, t: f64, z: &[f64]) -> Result<Complex64> {
    subordinated_bm_cf(&model.extended_subordinator()?, &model.brownian(), t, z)
}
