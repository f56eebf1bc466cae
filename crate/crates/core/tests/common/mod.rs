#![allow(dead_code)]

use etas_core::factor_nig::{a_max, msci_marginal, NigMarginal, RhoFactorModel};
use etas_core::quadrature::{decay_cutoff, Quadrature};
use etas_core::{Atom, EtasDistribution};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cd() -> NigMarginal {
    msci_marginal("CD").unwrap()
}

pub fn cs() -> NigMarginal {
    msci_marginal("CS").unwrap()
}

pub fn rel_err(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm().max(f64::MIN_POSITIVE)
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub fn random_direction(rng: &mut impl Rng, d: usize, positive: bool) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| if positive { rng.random_range(0.0..1.0) } else { rng.random_range(-1.0..1.0) })
            .collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-4 {
            return unit(v);
        }
    }
}

pub fn random_atoms(rng: &mut impl Rng, d: usize, positive: bool) -> Vec<Atom> {
    let n = rng.random_range(1..=4);
    (0..n)
        .map(|_| {
            Atom::new(
                random_direction(rng, d, positive),
                rng.random_range(0.2..3.0),
                rng.random_range(0.1..2.0),
            )
        })
        .collect()
}

/// Any valid ETaS law: alpha in (0, 2), dimension 1 to 3.
pub fn random_distribution(rng: &mut impl Rng) -> EtasDistribution {
    let d = rng.random_range(1..=3);
    let alpha = match rng.random_range(0..5) {
        0 => 1.0,
        _ => rng.random_range(0.05..1.95),
    };
    EtasDistribution::new(alpha, random_atoms(rng, d, false)).unwrap()
}

/// A law with alpha in (0, 1) and directions in the positive orthant.
pub fn random_subordinator(rng: &mut impl Rng) -> EtasDistribution {
    let d = rng.random_range(1..=3);
    let alpha = rng.random_range(0.05..0.95);
    EtasDistribution::new(alpha, random_atoms(rng, d, true)).unwrap()
}

pub fn random_vector(rng: &mut impl Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn random_marginal(rng: &mut impl Rng, symmetric: bool) -> NigMarginal {
    let gamma = rng.random_range(20.0..120.0);
    let beta = if symmetric { 0.0 } else { rng.random_range(-0.3..0.3) * gamma };
    NigMarginal::new(gamma, beta, rng.random_range(0.005..0.02)).unwrap()
}

pub fn random_correlation(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d + 1, |_, _| rng.random_range(-1.0f64..1.0));
    let cov = &g * g.transpose() + DMatrix::identity(d, d) * 0.05;
    DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            1.0
        } else {
            cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt()
        }
    })
}

pub fn random_model(rng: &mut impl Rng, d: usize, symmetric: bool) -> RhoFactorModel {
    let marginals: Vec<NigMarginal> = (0..d).map(|_| random_marginal(rng, symmetric)).collect();
    let a = rng.random_range(0.02..0.98) * a_max(&marginals);
    let rho = random_correlation(rng, d);
    RhoFactorModel::new(marginals, a, rho, rng.random_range(0.2..2.0)).unwrap()
}

/// Lévy–Khintchine exponent of a one-dimensional tempered stable law with a
/// single atom at direction `sign`, by adaptive quadrature:
/// `lambda int_0^inf (e^{i u w r} - 1 - i u w r 1{alpha >= 1}) e^{-beta r} r^{-alpha-1} dr`.
pub fn lk_exponent(alpha: f64, beta: f64, lambda: f64, sign: f64, u: f64) -> Complex64 {
    let v = sign * u;
    let compensated = alpha >= 1.0;
    let integrand = |r: f64| jump(v * r, compensated) * ((-beta * r).exp() * r.powf(-alpha - 1.0));
    let quad = Quadrature::with_tolerances(1e-15, 1e-12);
    let kappa = if compensated { 1.0 - alpha } else { -alpha };
    let head = quad.integrate_from_zero(integrand, 1.0, kappa).unwrap().value;
    let upper = decay_cutoff(|r| (-beta * r).exp() * r.powf(-alpha), 1.0, 1e-20);
    let tail = quad.integrate(integrand, 1.0, upper).unwrap().value;
    (head + tail) * lambda
}

/// `e^{ix} - 1`, minus `ix` when `compensated`, free of cancellation at
/// small `x`.
fn jump(x: f64, compensated: bool) -> Complex64 {
    let half = (0.5 * x).sin();
    let re = -2.0 * half * half;
    if !compensated {
        return Complex64::new(re, x.sin());
    }
    let im = if x.abs() < 0.1 {
        // sin x - x
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x.sin() - x
    };
    Complex64::new(re, im)
}

/// Cumulant function `log E[exp(<v, X>)]` for `alpha in (0, 1)` and real
/// `v` with `<w, v> < beta_w` on every atom, in plain real arithmetic.
pub fn real_cumulant(dist: &EtasDistribution, v: &[f64]) -> f64 {
    let alpha = dist.alpha();
    let g = gamma(1.0 - alpha) / -alpha;
    dist.atoms()
        .iter()
        .map(|atom| {
            let x: f64 = atom.direction.iter().zip(v).map(|(w, y)| w * y).sum();
            atom.mass * g * ((atom.tempering - x).powf(alpha) - atom.tempering.powf(alpha))
        })
        .sum()
}
