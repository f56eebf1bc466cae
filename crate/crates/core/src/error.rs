use std::fmt;

use thiserror::Error;

/// A single broken constraint found while validating an input object.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("alpha = {0} is outside (0, 2)")]
    AlphaOutOfRange(f64),
    #[error("the spherical measure has no atoms")]
    NoAtoms,
    #[error("atom {index}: direction has norm {norm}, expected a unit vector")]
    NonUnitDirection { index: usize, norm: f64 },
    #[error("atom {index}: tempering rate {value} must be positive and finite")]
    NonPositiveTempering { index: usize, value: f64 },
    #[error("atom {index}: mass {value} must be positive and finite")]
    NonPositiveMass { index: usize, value: f64 },
    #[error("atom {index}: dimension {found} differs from {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("alpha = {0} is outside (0, 1); a subordinator needs finite variation")]
    AlphaNotInZeroOne(f64),
    #[error("atom {index}: direction leaves the positive orthant; subordinator jumps must be nonnegative")]
    SupportNotPositiveOrthant { index: usize },
    #[error("self-similarity exponent q = {0} must be positive")]
    NonPositiveExponent(f64),
    #[error("loading {index}: a_j = {value} must be positive")]
    NonPositiveLoading { index: usize, value: f64 },
    #[error("loadings have length {found}, expected {expected}")]
    LoadingCount { expected: usize, found: usize },
    #[error("no marginals given")]
    NoMarginals,
    #[error("marginal {index}: gamma = {value} must be positive")]
    NonPositiveGamma { index: usize, value: f64 },
    #[error("marginal {index}: beta = {beta} must satisfy -gamma < beta < gamma (gamma = {gamma})")]
    SkewOutOfRange { index: usize, beta: f64, gamma: f64 },
    #[error("marginal {index}: delta = {value} must be positive")]
    NonPositiveDelta { index: usize, value: f64 },
    #[error("common parameter a = {a} must satisfy 0 < a < min_j zeta_j = {a_max}")]
    CommonParameterOutOfRange { a: f64, a_max: f64 },
    #[error("rho is {rows}x{cols}, expected {expected}x{expected}")]
    RhoShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("rho is not symmetric at ({row}, {col})")]
    RhoNotSymmetric { row: usize, col: usize },
    #[error("rho diagonal entry {index} is {value}, expected 1")]
    RhoDiagonal { index: usize, value: f64 },
    #[error("rho entry ({row}, {col}) = {value} lies outside [-1, 1]")]
    RhoEntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("rho is not positive semidefinite (smallest eigenvalue {min_eigenvalue})")]
    RhoNotPsd { min_eigenvalue: f64 },
}

/// Every violation found in one validation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }

    pub(crate) fn into_result<T>(self, value: T) -> Result<T> {
        if self.0.is_empty() {
            Ok(value)
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(Violations),
    #[error("mean and covariance formulas need alpha in (0, 1), got {0}")]
    AlphaOutOfRangeForMoments(f64),
    #[error("alpha mismatch: {left} vs {right}")]
    AlphaMismatch { left: f64, right: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale factor {0} must be positive")]
    NonPositiveScale(f64),
    #[error("radius {0} must be positive")]
    NonPositiveRadius(f64),
    #[error("time {0} must be positive")]
    NonPositiveTime(f64),
    #[error("atom index {index} out of range for {len} atoms")]
    AtomIndex { index: usize, len: usize },
    #[error("pair ({h}, {j}) is invalid for dimension {dim}")]
    InvalidPair { h: usize, j: usize, dim: usize },
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("time grid must be positive and strictly increasing")]
    InvalidGrid,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("sample is empty")]
    EmptySample,
    #[error("common-factor covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue})")]
    NonPsdSigma { min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
