//! Factor-based subordinators `S_j = X_j + a_j Z` and Brownian subordination.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation, Violations};
use crate::etas::{Atom, EtasDistribution};
use crate::sato::SatoLaw;

/// Tempering rate and Lévy mass of a one-dimensional component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperedComponent {
    pub beta: f64,
    pub lambda: f64,
}

/// Parameters of the factor construction: independent idiosyncratic parts
/// `X_j`, a common part `Z`, and positive loadings `a_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSubordinatorSpec {
    pub alpha: f64,
    pub idiosyncratic: Vec<TemperedComponent>,
    pub common: TemperedComponent,
    pub loadings: Vec<f64>,
}

impl FactorSubordinatorSpec {
    pub fn dim(&self) -> usize {
        self.idiosyncratic.len()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            out.push(Violation::AlphaNotInZeroOne(self.alpha));
        }
        if self.idiosyncratic.is_empty() {
            out.push(Violation::NoAtoms);
        }
        let comps = self.idiosyncratic.iter().chain(std::iter::once(&self.common));
        for (index, c) in comps.enumerate() {
            if !(c.beta > 0.0 && c.beta.is_finite()) {
                out.push(Violation::NonPositiveTempering { index, value: c.beta });
            }
            if !(c.lambda > 0.0 && c.lambda.is_finite()) {
                out.push(Violation::NonPositiveMass { index, value: c.lambda });
            }
        }
        if self.loadings.len() != self.dim() {
            out.push(Violation::LoadingCount {
                expected: self.dim(),
                found: self.loadings.len(),
            });
        }
        for (index, &value) in self.loadings.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                out.push(Violation::NonPositiveLoading { index, value });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        Violations(self.violations()).into_result(())
    }
}

/// Unit-time law of `S_j = X_j + a_j Z`: one atom per axis plus the common
/// atom `(a / ||a||, beta_Z / ||a||, lambda_Z ||a||^alpha)`, i.e. the scaling
/// rule applied to `||a|| Z` along `a / ||a||`.
pub fn build_factor_distribution(spec: &FactorSubordinatorSpec) -> Result<EtasDistribution> {
    spec.validate()?;
    let d = spec.dim();
    let norm = spec.loadings.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut atoms: Vec<Atom> = spec
        .idiosyncratic
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            Atom::new(e, c.beta, c.lambda)
        })
        .collect();
    atoms.push(Atom::new(
        spec.loadings.iter().map(|x| x / norm).collect(),
        spec.common.beta / norm,
        spec.common.lambda * norm.powf(spec.alpha),
    ));
    EtasDistribution::new(spec.alpha, atoms)
}

/// Brownian motion indexed by one coordinate of the subordinator, with values
/// in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianComponent {
    pub drift: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl BrownianComponent {
    /// `i <drift, z> - z' C z / 2`.
    pub fn log_cf(&self, z: &DVector<f64>) -> Complex64 {
        Complex64::new(-0.5 * z.dot(&(&self.covariance * z)), self.drift.dot(z))
    }
}

/// Multiparameter Brownian motion `B_A(s) = sum_k B_k(s_k)`, one independent
/// component per subordinator coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiParamBrownian {
    components: Vec<BrownianComponent>,
}

impl MultiParamBrownian {
    pub fn new(components: Vec<BrownianComponent>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidParameters("no Brownian components".into()));
        };
        let d = first.drift.len();
        for c in &components {
            if c.drift.len() != d || c.covariance.nrows() != d || c.covariance.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.drift.len(),
                });
            }
        }
        Ok(Self { components })
    }

    /// `d` independent one-dimensional motions, the `j`-th moving only
    /// coordinate `j`.
    pub fn independent(drifts: &[f64], vols: &[f64]) -> Result<Self> {
        if drifts.len() != vols.len() {
            return Err(Error::DimensionMismatch {
                expected: drifts.len(),
                found: vols.len(),
            });
        }
        let d = drifts.len();
        let components = (0..d)
            .map(|j| BrownianComponent {
                drift: DVector::from_fn(d, |i, _| if i == j { drifts[j] } else { 0.0 }),
                covariance: DMatrix::from_fn(d, d, |r, c| {
                    if r == j && c == j {
                        vols[j] * vols[j]
                    } else {
                        0.0
                    }
                }),
            })
            .collect();
        Self::new(components)
    }

    pub fn components(&self) -> &[BrownianComponent] {
        &self.components
    }

    pub fn subordinator_dim(&self) -> usize {
        self.components.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components[0].drift.len()
    }

    pub fn log_cf(&self, z: &[f64]) -> Vec<Complex64> {
        let z = DVector::from_column_slice(z);
        self.components.iter().map(|c| c.log_cf(&z)).collect()
    }
}

/// Characteristic function of `B_A(S(t))` at `z`:
/// `exp(psi_S(t^q log phi_A(z)))`, where `psi_S` is the log-Laplace exponent
/// of the subordinator's unit-time law.
pub fn subordinated_bm_cf(
    law: &SatoLaw,
    brownian: &MultiParamBrownian,
    t: f64,
    z: &[f64],
) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    if brownian.subordinator_dim() != law.dim() {
        return Err(Error::DimensionMismatch {
            expected: law.dim(),
            found: brownian.subordinator_dim(),
        });
    }
    if z.len() != brownian.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: brownian.output_dim(),
            found: z.len(),
        });
    }
    let tq = t.powf(law.q());
    let v: Vec<Complex64> = brownian.log_cf(z).into_iter().map(|x| x * tq).collect();
    Ok(law.base().log_laplace(&v).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sato::make_sato;
    use statrs::function::gamma::gamma;

    fn spec() -> FactorSubordinatorSpec {
        FactorSubordinatorSpec {
            alpha: 0.5,
            idiosyncratic: vec![
                TemperedComponent { beta: 0.7, lambda: 0.4 },
                TemperedComponent { beta: 1.3, lambda: 0.2 },
                TemperedComponent { beta: 0.4, lambda: 0.9 },
            ],
            common: TemperedComponent { beta: 0.5, lambda: 0.3 },
            loadings: vec![0.5, 1.5, 2.0],
        }
    }

    #[test]
    fn one_dimensional_unit_loading() {
        let s = FactorSubordinatorSpec {
            alpha: 0.3,
            idiosyncratic: vec![TemperedComponent { beta: 2.0, lambda: 0.5 }],
            common: TemperedComponent { beta: 1.0, lambda: 0.7 },
            loadings: vec![1.0],
        };
        let d = build_factor_distribution(&s).unwrap();
        let atoms = d.atoms();
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0], Atom::new(vec![1.0], 2.0, 0.5));
        assert_eq!(atoms[1], Atom::new(vec![1.0], 1.0, 0.7));
    }

    #[test]
    fn factor_cf_matches_product_form() {
        let s = spec();
        let dist = build_factor_distribution(&s).unwrap();
        let g = gamma(-s.alpha);
        let term = |beta: f64, lambda: f64, u: f64| {
            let x = Complex64::new(beta, -u);
            (((x.ln() * s.alpha).exp()) - beta.powf(s.alpha)) * (g * lambda)
        };
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 6.0 - 3.0
        };
        for _ in 0..100 {
            let z: Vec<f64> = (0..3).map(|_| next()).collect();
            let mut expected: Complex64 = s
                .idiosyncratic
                .iter()
                .zip(&z)
                .map(|(c, &u)| term(c.beta, c.lambda, u))
                .sum();
            let az: f64 = s.loadings.iter().zip(&z).map(|(a, u)| a * u).sum();
            expected += term(s.common.beta, s.common.lambda, az);
            let got = dist.char_function(&z);
            assert!((got - expected.exp()).norm() <= 1e-12 * expected.exp().norm());
        }
    }

    #[test]
    fn factor_support() {
        let p = build_factor_distribution(&spec()).unwrap().support_predicates();
        assert!(!p.independent_components);
        assert!(p.positive_orthant);
        assert!(p.full_dimensional);
    }

    #[test]
    fn invalid_spec_lists_problems() {
        let mut s = spec();
        s.alpha = 1.2;
        s.loadings = vec![1.0, -1.0];
        let Err(Error::Invalid(v)) = build_factor_distribution(&s) else {
            panic!()
        };
        assert!(v.0.contains(&Violation::AlphaNotInZeroOne(1.2)));
        assert!(v.0.contains(&Violation::LoadingCount { expected: 3, found: 2 }));
        assert!(v.0.contains(&Violation::NonPositiveLoading { index: 1, value: -1.0 }));
    }

    #[test]
    fn zero_drift_subordination_is_self_similar() {
        let law = make_sato(build_factor_distribution(&spec()).unwrap(), 0.8).unwrap();
        let bm = MultiParamBrownian::independent(&[0.0; 3], &[0.3, 1.0, 0.6]).unwrap();
        let z = [0.7, -0.2, 1.1];
        for t in [0.1, 2.0, 9.0] {
            let lhs = subordinated_bm_cf(&law, &bm, t, &z).unwrap();
            let s = t.powf(law.q() / 2.0);
            let zs: Vec<f64> = z.iter().map(|x| x * s).collect();
            let rhs = subordinated_bm_cf(&law, &bm, 1.0, &zs).unwrap();
            assert!((lhs - rhs).norm() <= 1e-13);
        }
        assert_eq!(
            subordinated_bm_cf(&law, &bm, 1.0, &[0.0; 3]).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(subordinated_bm_cf(&law, &bm, 0.0, &z), Err(Error::NonPositiveTime(0.0)));
    }
}
