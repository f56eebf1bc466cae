use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor_nig::RhoFactorModel;

/// Rows generated from one random stream.
pub const CHUNK_ROWS: usize = 4096;

const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub sample_count: usize,
    pub seed: u64,
    pub worker_count: usize,
}

impl McConfig {
    pub fn new(sample_count: usize, seed: u64, worker_count: usize) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::InvalidParameters("sample_count must be at least 1".into()));
        }
        if worker_count == 0 {
            return Err(Error::InvalidParameters("worker_count must be at least 1".into()));
        }
        Ok(Self {
            sample_count,
            seed,
            worker_count,
        })
    }
}

/// Row-major matrix of draws, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    cols: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn from_rows(cols: usize, data: Vec<f64>) -> Self {
        assert!(cols > 0 && data.len() % cols == 0, "ragged sample matrix");
        Self { cols, data }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(j).step_by(self.cols).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// One row per line, comma separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.iter_rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Generator for chunk `chunk` of a run seeded with `seed`: the ChaCha key
/// comes from the seed, the stream id is the chunk index.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Fills a `sample_count x cols` matrix, handing each row to `fill`. The
/// result depends only on `(seed, sample_count)`, not on the worker count.
pub fn generate<F>(config: &McConfig, cols: usize, fill: F) -> Result<SampleMatrix>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let mut data = vec![0.0; config.sample_count * cols];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build()
        .map_err(|e| Error::InvalidParameters(e.to_string()))?;
    pool.install(|| {
        data.par_chunks_mut(CHUNK_ROWS * cols)
            .enumerate()
            .for_each(|(k, chunk)| {
                let mut rng = chunk_rng(config.seed, k as u64);
                for row in chunk.chunks_exact_mut(cols) {
                    fill(&mut rng, row);
                }
            });
    });
    Ok(SampleMatrix::from_rows(cols, data))
}

/// Inverse Gaussian law `IG(a, b)` (mean `a / b`, variance `a / b^3`), drawn
/// with the Michael–Schucany–Haas transformation: the smaller root of the
/// chi-square equation, kept or swapped by a uniform acceptance step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGaussian {
    mean: f64,
    shape: f64,
}

impl InverseGaussian {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameters(format!("IG({a}, {b}) needs a, b > 0")));
        }
        Ok(Self {
            mean: a / b,
            shape: a * a,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.mean.powi(3) / self.shape
    }
}

impl Distribution<f64> for InverseGaussian {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let n: f64 = rng.sample(StandardNormal);
        let w = self.mean * n * n;
        // mu + mu/(2 shape) (w - sqrt(w^2 + 4 shape w)), without the cancellation
        let root = self.mean - 2.0 * self.mean * w / (w + (w * w + 4.0 * self.shape * w).sqrt());
        let root = root.max(f64::MIN_POSITIVE);
        let u: f64 = rng.random();
        if u <= self.mean / (self.mean + root) {
            root
        } else {
            self.mean * self.mean / root
        }
    }
}

pub fn sample_ig(a: f64, b: f64, config: &McConfig) -> Result<Vec<f64>> {
    let ig = InverseGaussian::new(a, b)?;
    let m = generate(config, 1, |rng, row| row[0] = ig.sample(rng))?;
    Ok(m.data)
}

struct SubordinatorSampler {
    idiosyncratic: Vec<InverseGaussian>,
    common: InverseGaussian,
    scale: f64,
}

impl SubordinatorSampler {
    fn new(model: &RhoFactorModel, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositiveTime(t));
        }
        let idiosyncratic = (0..model.dim())
            .map(|j| {
                let (k, b) = model.idiosyncratic_ig(j);
                InverseGaussian::new(k, b)
            })
            .collect::<Result<_>>()?;
        let (a, b) = model.common_ig();
        Ok(Self {
            idiosyncratic,
            common: InverseGaussian::new(a, b)?,
            scale: t.powf(model.q()),
        })
    }

    /// Fills `x` with `t^q X_j(1)` and returns `t^q Z(1)`.
    fn draw<R: Rng>(&self, rng: &mut R, x: &mut [f64]) -> f64 {
        for (xj, ig) in x.iter_mut().zip(&self.idiosyncratic) {
            *xj = self.scale * ig.sample(rng);
        }
        self.scale * self.common.sample(rng)
    }
}

/// Draws of `S(t) = t^q S(1)`, `S_j = X_j + a_j Z`.
pub fn sample_subordinator_at(model: &RhoFactorModel, t: f64, config: &McConfig) -> Result<SampleMatrix> {
    let sampler = SubordinatorSampler::new(model, t)?;
    let loadings = model.loadings();
    generate(config, model.dim(), |rng, row| {
        let z = sampler.draw(rng, row);
        for (s, aj) in row.iter_mut().zip(&loadings) {
            *s += aj * z;
        }
    })
}

/// A matrix `L` with `L L' = sigma`: Cholesky when it succeeds, otherwise a
/// clipped eigendecomposition for semidefinite input.
pub fn psd_factor(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(c) = Cholesky::new(sigma.clone()) {
        return Ok(c.l());
    }
    let eig = SymmetricEigen::new(sigma.clone());
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let min = eig.eigenvalues.min();
    if min < -PSD_TOLERANCE * scale {
        return Err(Error::NonPsdSigma { min_eigenvalue: min });
    }
    let roots = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots))
}

/// Draws of `Y(t)`: conditionally on the subordinator, each idiosyncratic
/// part is `N(mu_j x_j, sigma_j^2 x_j)` and the common part is
/// `N(mu^rho z, Sigma^rho z)`.
pub fn sample_y_rho_at(model: &RhoFactorModel, t: f64, config: &McConfig) -> Result<SampleMatrix> {
    let sampler = SubordinatorSampler::new(model, t)?;
    let factor = psd_factor(&model.common_covariance())?;
    let drifts = model.drifts();
    let vols = model.vols();
    let common_drift = model.common_drift();
    let d = model.dim();
    generate(config, d, |rng, row| {
        let z = sampler.draw(rng, row);
        let normals: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let sz = z.sqrt();
        for j in 0..d {
            let x = row[j];
            let e: f64 = rng.sample(StandardNormal);
            let common: f64 = (0..d).map(|k| factor[(j, k)] * normals[k]).sum();
            row[j] = drifts[j] * x + vols[j] * x.sqrt() * e + common_drift[j] * z + sz * common;
        }
    })
}
