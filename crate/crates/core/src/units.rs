//! Physical unit conversions shared by the link budget and the CLI.
//!
//! Every conversion is a single closed-form expression so results are
//! bit-reproducible across platforms with IEEE-754 `powf`.

use crate::error::{check, Result};

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// International mile in meters (exact).
pub const METERS_PER_MILE: f64 = 1609.344;

/// Power level in decibel-milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerDbm(pub f64);

/// Antenna gain in decibels relative to an isotropic radiator.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GainDbi(pub f64);

pub fn dbm_to_watts(p: PowerDbm) -> f64 {
    10f64.powf(p.0 / 10.0) / 1000.0
}

pub fn watts_to_dbm(watts: f64) -> PowerDbm {
    PowerDbm(10.0 * (watts * 1000.0).log10())
}

pub fn dbi_to_linear(g: GainDbi) -> f64 {
    10f64.powf(g.0 / 10.0)
}

pub fn wavelength_from_frequency(frequency_hz: f64) -> Result<f64> {
    check(
        frequency_hz.is_finite() && frequency_hz > 0.0,
        "frequency",
        frequency_hz,
        "must be finite and > 0",
    )?;
    Ok(SPEED_OF_LIGHT / frequency_hz)
}

pub fn miles_to_meters(miles: f64) -> Result<f64> {
    check(
        miles.is_finite() && miles >= 0.0,
        "distance",
        miles,
        "must be finite and >= 0",
    )?;
    Ok(miles * METERS_PER_MILE)
}
