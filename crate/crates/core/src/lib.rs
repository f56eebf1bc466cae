//! Exponentially tilted alpha-stable (ETaS) laws on the positive orthant,
//! their Sato processes, factor subordinators built from them, and the
//! NIG-marginal subordinated Brownian model with its correlation term
//! structure.

pub mod error;
pub mod etas;
pub mod factor_nig;
pub mod input;
pub mod montecarlo;
pub mod quadrature;
pub mod sato;

pub use error::{Error, Result, Violation, Violations};
pub use etas::{Atom, EtasDistribution, MeanCovariance, SpectralAtom, SupportPredicates, VariationClass};
pub use factor_nig::{CorrelationCurve, NigMarginal, RhoFactorModel};
pub use sato::SatoLaw;
