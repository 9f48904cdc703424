use thiserror::Error;

use crate::optimizer::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    /// A parameter lies outside the domain of the model.
    #[error("{name} = {value} is out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Harvesting can never cover the circuit energy, so the requested
    /// quantity (e.g. the B_b thresholds) does not exist.
    #[error("harvest-then-transmit is infeasible: {0}")]
    Infeasible(String),

    #[error("calibration failed: {reason}{}", regime_note(regime))]
    Calibration {
        reason: String,
        regime: Option<Regime>,
    },

    #[error("numeric search did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("sweep point {index} ({value}): {source}")]
    GridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<ModelError>,
    },
}

fn regime_note(regime: &Option<Regime>) -> String {
    match regime {
        Some(r) => format!(" (optimizer regime: {r})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn check(ok: bool, name: &'static str, value: f64, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name,
            value,
            expected,
        })
    }
}

/// `value` must lie in the closed unit interval.
pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    check((0.0..=1.0).contains(&value), name, value, "must lie in [0, 1]")
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    check(value.is_finite() && value > 0.0, name, value, "must be finite and > 0")
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    check(value.is_finite() && value >= 0.0, name, value, "must be finite and >= 0")
}
