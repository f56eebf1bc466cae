//! JSON input files: a distribution, a Sato law, or a factor model, told
//! apart by their top-level keys.

use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::{Violation, Violations};
use crate::etas::{violations, EtasDistribution, RawDistribution};
use crate::factor_nig::model::{model_violations, rho_from_rows, RawModel};
use crate::factor_nig::RhoFactorModel;
use crate::sato::{sato_violations, SatoLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Distribution,
    Sato,
    Model,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Distribution(EtasDistribution),
    Sato(SatoLaw),
    Model(RhoFactorModel),
}

impl Input {
    pub fn kind(&self) -> InputKind {
        match self {
            Self::Distribution(_) => InputKind::Distribution,
            Self::Sato(_) => InputKind::Sato,
            Self::Model(_) => InputKind::Model,
        }
    }
}

#[derive(Debug, Error)]
pub enum InputError {
    /// Not JSON, or not shaped like any known input.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed but violating model constraints.
    #[error("{1}")]
    Invalid(InputKind, Violations),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSato {
    base: RawDistribution,
    q: f64,
}

pub fn detect_kind(object: &Map<String, Value>) -> Option<InputKind> {
    if object.contains_key("marginals") {
        Some(InputKind::Model)
    } else if object.contains_key("base") {
        Some(InputKind::Sato)
    } else if object.contains_key("atoms") {
        Some(InputKind::Distribution)
    } else {
        None
    }
}

fn decode<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, InputError> {
    serde_json::from_value(value).map_err(|e| InputError::Parse(e.to_string()))
}

fn checked<T>(kind: InputKind, v: Vec<Violation>, build: impl FnOnce() -> T) -> Result<T, InputError> {
    if v.is_empty() {
        Ok(build())
    } else {
        Err(InputError::Invalid(kind, Violations(v)))
    }
}

/// Parses and validates an input document, reporting every violated
/// constraint rather than the first.
pub fn parse_input(text: &str) -> Result<Input, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InputError::Parse(e.to_string()))?;
    let Value::Object(object) = &value else {
        return Err(InputError::Parse("expected a JSON object".into()));
    };
    let kind = detect_kind(object).ok_or_else(|| {
        InputError::Parse("unrecognized input: expected a distribution, Sato law or model object".into())
    })?;
    match kind {
        InputKind::Distribution => {
            let raw: RawDistribution = decode(value)?;
            checked(kind, violations(raw.alpha, &raw.atoms), || ())?;
            Ok(Input::Distribution(EtasDistribution::new(raw.alpha, raw.atoms).expect("validated")))
        }
        InputKind::Sato => {
            let raw: RawSato = decode(value)?;
            let base_violations = violations(raw.base.alpha, &raw.base.atoms);
            if !base_violations.is_empty() {
                let mut all = base_violations;
                if !(raw.q > 0.0 && raw.q.is_finite()) {
                    all.push(Violation::NonPositiveExponent(raw.q));
                }
                return Err(InputError::Invalid(kind, Violations(all)));
            }
            let base = EtasDistribution::new(raw.base.alpha, raw.base.atoms).expect("validated");
            checked(kind, sato_violations(&base, raw.q), || ())?;
            Ok(Input::Sato(SatoLaw::new(base, raw.q).expect("validated")))
        }
        InputKind::Model => {
            let raw: RawModel = decode(value)?;
            let rho = rho_from_rows(&raw.rho, raw.marginals.len())
                .map_err(|v| InputError::Invalid(kind, Violations(vec![v])))?;
            checked(kind, model_violations(&raw.marginals, raw.a, &rho, raw.q), || ())?;
            Ok(Input::Model(RhoFactorModel::new(raw.marginals, raw.a, rho, raw.q).expect("validated")))
        }
    }
}
