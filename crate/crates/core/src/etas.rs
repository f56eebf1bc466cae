//! Multivariate exponential tempered stable laws with a discrete spherical
//! measure.
//!
//! The Lévy measure is written in polar form: a finite measure on the unit
//! sphere (a list of atoms) and, for each direction `w`, the radial density
//! `exp(-beta_w r) / r^(alpha + 1)`. Each atom carries its own tempering rate,
//! so two atoms may share a direction; this keeps the family closed under
//! convolution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result, Violation, Violations};

/// Tolerance on `| ||w|| - 1 |` for atom directions.
pub const UNIT_TOLERANCE: f64 = 1e-12;

const RANK_TOLERANCE: f64 = 1e-10;

/// One point of the spherical measure together with its tempering rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub direction: Vec<f64>,
    #[serde(rename = "beta")]
    pub tempering: f64,
    #[serde(rename = "lambda")]
    pub mass: f64,
}

impl Atom {
    pub fn new(direction: Vec<f64>, tempering: f64, mass: f64) -> Self {
        Self {
            direction,
            tempering,
            mass,
        }
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    fn project(&self, v: &[Complex64]) -> Complex64 {
        self.direction
            .iter()
            .zip(v)
            .map(|(w, x)| x * *w)
            .sum()
    }
}

/// Image of an atom under the spectral map `w -> w / beta(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtom {
    pub location: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariationClass {
    /// `alpha < 1`: jumps are summable near the origin.
    FiniteVariationInfiniteActivity,
    InfiniteVariation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPredicates {
    /// Atoms lie on the coordinate axes, so the components are independent.
    pub independent_components: bool,
    /// Atom directions span `R^d`; the law is absolutely continuous.
    pub full_dimensional: bool,
    pub positive_orthant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanCovariance {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RawDistribution {
    pub(crate) alpha: f64,
    pub(crate) atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct EtasDistribution {
    alpha: f64,
    atoms: Vec<Atom>,
}

impl TryFrom<RawDistribution> for EtasDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(raw.alpha, raw.atoms)
    }
}

impl From<EtasDistribution> for RawDistribution {
    fn from(d: EtasDistribution) -> Self {
        Self {
            alpha: d.alpha,
            atoms: d.atoms,
        }
    }
}

/// Collects every constraint the pair `(alpha, atoms)` breaks.
pub fn violations(alpha: f64, atoms: &[Atom]) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(alpha > 0.0 && alpha < 2.0) {
        out.push(Violation::AlphaOutOfRange(alpha));
    }
    let Some(first) = atoms.first() else {
        out.push(Violation::NoAtoms);
        return out;
    };
    let dim = first.dim();
    for (index, atom) in atoms.iter().enumerate() {
        if atom.dim() != dim || atom.dim() == 0 {
            out.push(Violation::DimensionMismatch {
                index,
                expected: dim.max(1),
                found: atom.dim(),
            });
            continue;
        }
        let norm = norm(&atom.direction);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            out.push(Violation::NonUnitDirection { index, norm });
        }
        if !(atom.tempering > 0.0 && atom.tempering.is_finite()) {
            out.push(Violation::NonPositiveTempering {
                index,
                value: atom.tempering,
            });
        }
        if !(atom.mass > 0.0 && atom.mass.is_finite()) {
            out.push(Violation::NonPositiveMass {
                index,
                value: atom.mass,
            });
        }
    }
    out
}

impl EtasDistribution {
    /// Validates and builds a distribution. Directions within
    /// [`UNIT_TOLERANCE`] of unit length are renormalized; anything further
    /// off is rejected.
    pub fn new(alpha: f64, mut atoms: Vec<Atom>) -> Result<Self> {
        Violations(violations(alpha, &atoms)).into_result(())?;
        for atom in &mut atoms {
            let n = norm(&atom.direction);
            atom.direction.iter_mut().for_each(|x| *x /= n);
        }
        Ok(Self { alpha, atoms })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn atom(&self, index: usize) -> Result<&Atom> {
        self.atoms.get(index).ok_or(Error::AtomIndex {
            index,
            len: self.atoms.len(),
        })
    }

    /// `log E[exp(<v, X>)]` for complex `v`, evaluated atom by atom.
    ///
    /// With `v = i z` this is the characteristic exponent. Other arguments are
    /// used by Brownian subordination, where each projection `<w, v>` must
    /// have real part below the atom's tempering rate.
    ///
    /// # Panics
    /// If `v.len()` differs from the dimension.
    pub fn log_laplace(&self, v: &[Complex64]) -> Complex64 {
        assert_eq!(v.len(), self.dim(), "argument dimension mismatch");
        let g = gamma(-self.alpha);
        self.atoms
            .iter()
            .map(|atom| atom.mass * radial_exponent(self.alpha, g, atom.tempering, atom.project(v)))
            .sum()
    }

    /// Logarithm of the characteristic function at `z`.
    ///
    /// # Panics
    /// If `z.len()` differs from the dimension.
    pub fn char_exponent(&self, z: &[f64]) -> Complex64 {
        let v: Vec<Complex64> = z.iter().map(|&x| Complex64::new(0.0, x)).collect();
        self.log_laplace(&v)
    }

    pub fn char_function(&self, z: &[f64]) -> Complex64 {
        self.char_exponent(z).exp()
    }

    /// `lambda_w exp(-beta_w r) / r^(alpha + 1)` for atom `atom_index`.
    pub fn levy_radial_density(&self, atom_index: usize, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let atom = self.atom(atom_index)?;
        Ok(atom.mass * (-atom.tempering * r).exp() / r.powf(self.alpha + 1.0))
    }

    pub fn variation_class(&self) -> VariationClass {
        if self.alpha < 1.0 {
            VariationClass::FiniteVariationInfiniteActivity
        } else {
            VariationClass::InfiniteVariation
        }
    }

    pub fn spectral_r(&self) -> Vec<SpectralAtom> {
        self.atoms
            .iter()
            .map(|a| SpectralAtom {
                location: a.direction.iter().map(|w| w / a.tempering).collect(),
                weight: a.tempering.powf(self.alpha) * a.mass,
            })
            .collect()
    }

    /// Whether `E ||X||^k` is finite.
    ///
    /// For `k < alpha` this always holds; for `k = alpha` it needs
    /// `sum_{beta_w > 1} beta_w^alpha log(beta_w) lambda_w < inf`; for `k > alpha`
    /// it needs `sum beta_w^(-k-alpha) lambda_w < inf`. With finitely many atoms
    /// and positive rates every criterion is a finite sum.
    pub fn moment_exists(&self, k: f64) -> bool {
        if !(k > 0.0) {
            return false;
        }
        let criterion: f64 = if k < self.alpha {
            0.0
        } else if k == self.alpha {
            self.atoms
                .iter()
                .filter(|a| a.tempering > 1.0)
                .map(|a| a.tempering.powf(self.alpha) * a.tempering.ln() * a.mass)
                .sum()
        } else {
            self.atoms
                .iter()
                .map(|a| a.tempering.powf(-k - self.alpha) * a.mass)
                .sum()
        };
        criterion.is_finite()
    }

    /// Mean vector and covariance matrix, available for `alpha` in (0, 1).
    pub fn mean_and_covariance(&self) -> Result<MeanCovariance> {
        if !(self.alpha < 1.0) {
            return Err(Error::AlphaOutOfRangeForMoments(self.alpha));
        }
        let d = self.dim();
        let g1 = gamma(1.0 - self.alpha);
        let g2 = gamma(2.0 - self.alpha);
        let mut mean = DVector::zeros(d);
        let mut covariance = DMatrix::zeros(d, d);
        for a in &self.atoms {
            let w = DVector::from_column_slice(&a.direction);
            mean += &w * (g1 * a.tempering.powf(self.alpha - 1.0) * a.mass);
            covariance += &w * w.transpose() * (g2 * a.tempering.powf(self.alpha - 2.0) * a.mass);
        }
        Ok(MeanCovariance { mean, covariance })
    }

    /// Law of the sum of independent draws from `self` and `other`.
    ///
    /// Atoms with identical direction and tempering are merged; all others are
    /// kept side by side.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch {
                left: self.alpha,
                right: other.alpha,
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let mut atoms = self.atoms.clone();
        for b in &other.atoms {
            match atoms
                .iter_mut()
                .find(|a| a.direction == b.direction && a.tempering == b.tempering)
            {
                Some(a) => a.mass += b.mass,
                None => atoms.push(b.clone()),
            }
        }
        Ok(Self {
            alpha: self.alpha,
            atoms,
        })
    }

    /// Law of `c X`: tempering divided by `c`, mass multiplied by `c^alpha`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositiveScale(c));
        }
        let factor = c.powf(self.alpha);
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                direction: a.direction.clone(),
                tempering: a.tempering / c,
                mass: a.mass * factor,
            })
            .collect();
        Ok(Self {
            alpha: self.alpha,
            atoms,
        })
    }

    pub fn support_predicates(&self) -> SupportPredicates {
        let d = self.dim();
        let on_axis = |w: &[f64]| {
            let big = w.iter().filter(|x| (x.abs() - 1.0).abs() <= UNIT_TOLERANCE).count();
            let small = w.iter().filter(|x| x.abs() <= UNIT_TOLERANCE).count();
            big == 1 && small == d - 1
        };
        let independent_components = self.atoms.iter().all(|a| on_axis(&a.direction));
        let positive_orthant = self
            .atoms
            .iter()
            .all(|a| a.direction.iter().all(|&x| x >= -UNIT_TOLERANCE));
        let full_dimensional = self.atoms.len() >= d && {
            let m = DMatrix::from_fn(d, self.atoms.len(), |i, k| self.atoms[k].direction[i]);
            let sv = m.singular_values();
            sv.len() == d && sv.iter().all(|&s| s > RANK_TOLERANCE)
        };
        SupportPredicates {
            independent_components,
            full_dimensional,
            positive_orthant,
        }
    }
}

/// Log-Laplace exponent of one radial law with unit mass at argument `s`
/// (`s = i u` gives the characteristic exponent). `g` is `Gamma(-alpha)`.
///
/// For `alpha >= 1` the jumps are compensated by `-s r`, which is the
/// centering of the closed forms. At `alpha = 1` the exponent follows from
/// the spectral representation: `(beta - s) log(1 - s / beta) + s`.
///
/// Near the origin the power series in `x = s / beta` replaces the closed
/// forms, which lose relative accuracy to cancellation there.
pub(crate) fn radial_exponent(alpha: f64, g: f64, beta: f64, s: Complex64) -> Complex64 {
    let x = s / beta;
    let one = Complex64::new(1.0, 0.0);
    if alpha == 1.0 {
        let h = if x.norm() < SERIES_RADIUS {
            // (1 - x) log(1 - x) + x = sum_{k >= 2} x^k / (k (k - 1))
            power_series(x, 2, |k| 1.0 / (k * (k - 1.0)))
        } else {
            (one - x) * (one - x).ln() + x
        };
        return h * beta;
    }
    let h = if x.norm() < SERIES_RADIUS {
        // (1 - x)^alpha - 1 [+ alpha x] = sum_k binom(alpha, k) (-x)^k
        let first = if alpha > 1.0 { 2 } else { 1 };
        power_series(-x, first, |k| binomial(alpha, k))
    } else if alpha < 1.0 {
        expm1((one - x).ln() * alpha)
    } else {
        // (1 - x)^alpha - 1 + alpha x without the O(alpha - 1) cancellation
        let delta = alpha - 1.0;
        (one - x) * expm1((one - x).ln() * delta) + x * delta
    };
    h * (g * beta.powf(alpha))
}

const SERIES_RADIUS: f64 = 0.25;

/// `exp(w) - 1`, accurate for small `w`.
fn expm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * half * half,
        w.re.exp() * w.im.sin(),
    )
}

fn binomial(alpha: f64, k: f64) -> f64 {
    (0..k as usize).fold(1.0, |c, i| c * (alpha - i as f64) / (i as f64 + 1.0))
}

/// `sum_{k >= first} coef(k) y^k`, truncated once terms stop contributing.
fn power_series(y: Complex64, first: usize, coef: impl Fn(f64) -> f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = y.powu(first as u32);
    for k in first..first + 200 {
        let term = pow * coef(k as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        pow *= y;
    }
    sum
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
