//! Factor-based subordinators, the rho-factor Sato-subordinated Brownian
//! motion with NIG marginals, and its correlation term structure.

mod cases;
mod correlation;
mod factor;
pub(crate) mod model;

pub use cases::{
    msci_marginal, reproduce_table, round_half_even, CommonParameter, Scenario, TableRow,
    CORRELATED_SCENARIOS, INDEPENDENT_SCENARIOS, MSCI_NIG_MARGINALS,
};
pub use correlation::{
    baseline_levy_correlation, baseline_sato_nig_correlation, correlation, correlation_curve,
    correlation_limits, parse_curve_csv, time_grid, CorrelationCurve, CorrelationLimits,
};
pub use factor::{
    build_factor_distribution, subordinated_bm_cf, BrownianComponent, FactorSubordinatorSpec,
    MultiParamBrownian, TemperedComponent,
};
pub use model::{
    a_max, ig_as_tempered, ig_cf, ig_log_laplace, model_violations, nig_model_cf,
    subordinated_model_cf, MeanVariance, NigMarginal, RhoFactorModel, SubordinatorMoments,
};
