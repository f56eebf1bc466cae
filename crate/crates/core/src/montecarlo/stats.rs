use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sampling::SampleMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfEstimate {
    pub value: Complex64,
    pub se_re: f64,
    pub se_im: f64,
}

/// Streaming mean and central moments (Welford / Pébay updates).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let delta = x - self.mean;
        let delta_n = delta / self.n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (self.n * self.n - 3.0 * self.n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (self.n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    fn from_iter(it: impl Iterator<Item = f64>) -> Self {
        let mut m = Self::default();
        it.for_each(|x| m.push(x));
        m
    }

    fn variance(&self) -> f64 {
        self.m2 / self.n
    }

    fn mean_estimate(&self) -> Estimate {
        Estimate {
            value: self.mean,
            se: (self.variance() / self.n).sqrt(),
        }
    }
}

fn non_empty(samples: &SampleMatrix) -> Result<()> {
    if samples.rows() == 0 {
        Err(Error::EmptySample)
    } else {
        Ok(())
    }
}

pub fn empirical_mean(samples: &SampleMatrix, j: usize) -> Result<Estimate> {
    non_empty(samples)?;
    Ok(Moments::from_iter(samples.column(j)).mean_estimate())
}

/// Sample variance with the asymptotic standard error `sqrt((m4 - m2^2) / n)`.
pub fn empirical_variance(samples: &SampleMatrix, j: usize) -> Result<Estimate> {
    non_empty(samples)?;
    let m = Moments::from_iter(samples.column(j));
    let var = m.variance();
    let m4 = m.m4 / m.n;
    Ok(Estimate {
        value: var,
        se: ((m4 - var * var).max(0.0) / m.n).sqrt(),
    })
}

/// Mean of `exp(i <z, x>)` over the rows, with separate standard errors for
/// the real and imaginary parts.
pub fn empirical_cf(samples: &SampleMatrix, z: &[f64]) -> Result<CfEstimate> {
    non_empty(samples)?;
    if z.len() != samples.cols() {
        return Err(Error::DimensionMismatch {
            expected: samples.cols(),
            found: z.len(),
        });
    }
    let mut re = Moments::default();
    let mut im = Moments::default();
    for row in samples.iter_rows() {
        let phase: f64 = row.iter().zip(z).map(|(x, u)| x * u).sum();
        let (s, c) = phase.sin_cos();
        re.push(c);
        im.push(s);
    }
    let (re, im) = (re.mean_estimate(), im.mean_estimate());
    Ok(CfEstimate {
        value: Complex64::new(re.value, im.value),
        se_re: re.se,
        se_im: im.se,
    })
}

/// Pearson correlation of columns `h` and `j`.
///
/// The standard error comes from the influence function of the correlation
/// coefficient, `x y - r (x^2 + y^2) / 2` on standardized data, so it stays
/// valid for heavy-tailed samples where the normal-theory value
/// `(1 - r^2) / sqrt(n - 3)` would understate it.
pub fn empirical_correlation(samples: &SampleMatrix, h: usize, j: usize) -> Result<Estimate> {
    non_empty(samples)?;
    let n = samples.rows() as f64;
    let mx = Moments::from_iter(samples.column(h));
    let my = Moments::from_iter(samples.column(j));
    let (sx, sy) = (mx.variance().sqrt(), my.variance().sqrt());
    if !(sx > 0.0 && sy > 0.0) {
        return Ok(Estimate { value: f64::NAN, se: f64::NAN });
    }
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for row in samples.iter_rows() {
        let (x, y) = (row[h] - mx.mean, row[j] - my.mean);
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let influence = Moments::from_iter(samples.iter_rows().map(|row| {
        let x = (row[h] - mx.mean) / sx;
        let y = (row[j] - my.mean) / sy;
        x * y - 0.5 * r * (x * x + y * y)
    }));
    Ok(Estimate {
        value: r,
        se: (influence.variance() / n).sqrt(),
    })
}
