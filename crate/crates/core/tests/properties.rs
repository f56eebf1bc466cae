mod common;

use common::rel_err;
use etas_core::factor_nig::{
    correlation, correlation_curve, correlation_limits, nig_model_cf, parse_curve_csv,
    subordinated_model_cf, time_grid, NigMarginal, RhoFactorModel,
};
use etas_core::{Atom, EtasDistribution, SatoLaw};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn atom(d: usize, positive: bool) -> impl Strategy<Value = Atom> {
    let lo = if positive { 0.01 } else { -1.0 };
    (prop::collection::vec(lo..1.0f64, d), 0.2..3.0f64, 0.1..2.0f64)
        .prop_filter("non-degenerate direction", |(v, ..)| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|(v, b, l)| Atom::new(unit(v), b, l))
}

fn distribution(alpha: std::ops::Range<f64>, positive: bool) -> impl Strategy<Value = EtasDistribution> {
    (1usize..=3, alpha).prop_flat_map(move |(d, a)| {
        prop::collection::vec(atom(d, positive), 1..=4)
            .prop_map(move |atoms| EtasDistribution::new(a, atoms).unwrap())
    })
}

fn with_z(dist: impl Strategy<Value = EtasDistribution>) -> impl Strategy<Value = (EtasDistribution, Vec<f64>)> {
    dist.prop_flat_map(|d| {
        let n = d.dim();
        (Just(d), prop::collection::vec(-4.0..4.0f64, n))
    })
}

fn marginal() -> impl Strategy<Value = NigMarginal> {
    (20.0..120.0f64, -0.3..0.3f64, 0.005..0.02f64)
        .prop_map(|(g, b, d)| NigMarginal::new(g, b * g, d).unwrap())
}

fn bivariate() -> impl Strategy<Value = RhoFactorModel> {
    (marginal(), marginal(), 0.02..0.98f64, -0.99..0.99f64, 0.2..2.0f64).prop_map(|(m1, m2, f, rho, q)| {
        let a = f * m1.zeta().min(m2.zeta());
        RhoFactorModel::bivariate(m1, m2, a, rho, q).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cf_is_hermitian_and_bounded((dist, z) in with_z(distribution(0.05..1.95, false))) {
        let phi = dist.char_function(&z);
        let minus: Vec<f64> = z.iter().map(|x| -x).collect();
        prop_assert!(rel_err(dist.char_function(&minus), phi.conj()) <= 1e-13);
        prop_assert!(phi.norm() <= 1.0);
        prop_assert_eq!(dist.char_function(&vec![0.0; z.len()]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn spectral_identity(dist in distribution(0.05..1.95, false)) {
        let lhs: f64 = dist
            .spectral_r()
            .iter()
            .map(|s| s.location.iter().map(|x| x * x).sum::<f64>().sqrt().powf(dist.alpha()) * s.weight)
            .sum();
        prop_assert!((lhs - dist.total_mass()).abs() <= 1e-12 * dist.total_mass());
    }

    #[test]
    fn covariance_is_psd(dist in distribution(0.05..0.95, false)) {
        let c = dist.mean_and_covariance().unwrap().covariance;
        let eig = c.clone().symmetric_eigen();
        prop_assert!(eig.eigenvalues.min() >= -1e-12 * c.amax());
        prop_assert!((&c - c.transpose()).amax() == 0.0);
    }

    #[test]
    fn sato_cf_at_unit_time_is_base_cf((dist, z) in with_z(distribution(0.05..0.95, true)), q in 0.1..3.0f64) {
        let law = SatoLaw::new(dist.clone(), q).unwrap();
        prop_assert_eq!(law.cf(1.0, &z).unwrap(), dist.char_function(&z));
        prop_assert_eq!(law.cf(2.5, &vec![0.0; z.len()]).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sato_densities_are_positive(dist in distribution(0.05..0.95, true), q in 0.1..3.0f64, u in 1e-3..50.0f64, r in 1e-3..20.0f64) {
        let beta = dist.atoms()[0].tempering;
        let law = SatoLaw::new(dist, q).unwrap();
        let density = law.time_t_levy_radial(u, 0, r).unwrap();
        let rate = law.differential_levy_radial(u, 0, r).unwrap();
        prop_assert!(density >= 0.0 && rate >= 0.0);
        // strictly positive unless exp(-beta r u^-q) underflows
        if beta * r * u.powf(-q) < 700.0 {
            prop_assert!(density > 0.0 && rate > 0.0);
        }
    }

    #[test]
    fn model_cf_routes_agree(model in bivariate(), t in 0.05..20.0f64, z in prop::collection::vec(-80.0..80.0f64, 2)) {
        let direct = nig_model_cf(&model, t, &z).unwrap();
        let generic = subordinated_model_cf(&model, t, &z).unwrap();
        prop_assert!(rel_err(generic, direct) <= 1e-12, "{generic} vs {direct}");
    }

    #[test]
    fn curve_values_are_correlations(model in bivariate()) {
        let grid = time_grid(1e-4, 1e4, 50, false).unwrap();
        let curve = correlation_curve(&model, 0, 1, &grid).unwrap();
        prop_assert!(curve.values.iter().all(|v| (-1.0..=1.0).contains(v)));
        let limits = correlation_limits(&model, 0, 1).unwrap();
        prop_assert!(limits.limit_infinity > 0.0 && limits.limit_infinity < 1.0);
    }

    #[test]
    fn curve_csv_round_trips(model in bivariate(), linear in any::<bool>()) {
        let grid = time_grid(1e-3, 1109.0, 40, linear).unwrap();
        let csv = correlation_curve(&model, 0, 1, &grid).unwrap().to_csv();
        for (t, v) in parse_curve_csv(&csv).unwrap() {
            prop_assert!((correlation(&model, t, 0, 1).unwrap() - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn marginal_cf_ignores_rho(model in bivariate(), t in 0.05..20.0f64, u in -80.0..80.0f64) {
        let identity = model.with_common(model.a(), DMatrix::identity(2, 2), model.q()).unwrap();
        for z in [[u, 0.0], [0.0, u]] {
            prop_assert!(rel_err(model.cf(t, &z).unwrap(), identity.cf(t, &z).unwrap()) <= 1e-13);
        }
    }
}
