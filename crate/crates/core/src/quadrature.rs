//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Used as an independent numerical oracle for the closed-form
//! characteristic exponents and Lévy densities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use thiserror::Error;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_680_396_549,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("no convergence after {subdivisions} subdivisions (value {value}, error {error:e})")]
    NotConverged {
        value: Complex64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 5_000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadError> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
        for &p in pts {
            let at = centre + half * p;
            let y = f(at);
            if !(y.re.is_finite() && y.im.is_finite()) {
                return Err(QuadError::NonFinite(at));
            }
            kronrod += y * wk;
            if i % 2 == 1 {
                gauss += y * WG[i / 2];
            }
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
    })
}

impl Quadrature {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates a complex-valued `f` over the finite interval `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<Estimate<Complex64>, QuadError>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut heap = BinaryHeap::new();
        let first = kronrod(&f, a, b)?;
        let mut total = first.value;
        let mut error = first.error;
        heap.push(first);
        let mut subdivisions = 0;
        while error > self.abs_tol.max(self.rel_tol * total.norm()) {
            if subdivisions >= self.max_subdivisions {
                return Err(QuadError::NotConverged {
                    value: total,
                    error,
                    subdivisions,
                });
            }
            let worst = heap.pop().expect("heap holds at least one segment");
            let mid = 0.5 * (worst.a + worst.b);
            let left = kronrod(&f, worst.a, mid)?;
            let right = kronrod(&f, mid, worst.b)?;
            total += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            subdivisions += 1;
            // the running sums drift; refresh them now and then
            if subdivisions % 64 == 0 {
                total = heap.iter().map(|s| s.value).sum();
                error = heap.iter().map(|s| s.error).sum();
            }
        }
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        Ok(Estimate { value, error })
    }

    pub fn integrate_real<F>(&self, f: F, a: f64, b: f64) -> Result<Estimate<f64>, QuadError>
    where
        F: Fn(f64) -> f64,
    {
        let est = self.integrate(|x| Complex64::new(f(x), 0.0), a, b)?;
        Ok(Estimate {
            value: est.value.re,
            error: est.error,
        })
    }

    /// `int_0^b f(r) dr` for an integrand behaving like `r^kappa` (`kappa > -1`)
    /// at the origin. Substitutes `r = s^p` with `p = 1 / (1 + kappa)` so the
    /// transformed integrand is bounded at zero.
    pub fn integrate_from_zero<F>(&self, f: F, b: f64, kappa: f64) -> Result<Estimate<Complex64>, QuadError>
    where
        F: Fn(f64) -> Complex64,
    {
        assert!(kappa > -1.0, "integrand must be integrable at zero");
        let p = 1.0 / (1.0 + kappa);
        let upper = b.powf(1.0 / p);
        self.integrate(
            |s| {
                if s == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                f(s.powf(p)) * (p * s.powf(p - 1.0))
            },
            0.0,
            upper,
        )
    }
}

/// Smallest `start * 2^k` past which `envelope` stays below `rel` times its
/// value at `start`. Intended for exponentially decaying envelopes.
pub fn decay_cutoff<F: Fn(f64) -> f64>(envelope: F, start: f64, rel: f64) -> f64 {
    let reference = envelope(start);
    let mut x = start.max(f64::MIN_POSITIVE) * 2.0;
    while envelope(x) > rel * reference {
        x *= 2.0;
        if !x.is_finite() {
            break;
        }
    }
    x
}
