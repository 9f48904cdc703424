//! Per-frame bit counts for the two secondary-transmitter modes.
//!
//! A frame of length `frame` seconds splits into an idle part `β·frame` and
//! a busy part `(1-β)·frame`. During the busy part the transmitter harvests
//! for a fraction `α` and backscatters for `1-α`; the harvested energy, less
//! the circuit energy, funds an active transmission of length `μ` inside the
//! idle part.

use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{check, check_non_negative, check_positive, check_unit, Result};
use crate::linkbudget::{self, LinkParams};
use crate::units::{self, GainDbi, PowerDbm};

/// Secondary channel and frame structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Fraction β of the frame during which the primary channel is idle.
    pub idle_ratio: f64,
    /// Channel bandwidth W, hertz.
    pub bandwidth: f64,
    /// Noise power over channel gain (P₀ = N₀/h), watts.
    pub noise_over_gain: f64,
    /// Active transmission efficiency κ in [0, 1].
    pub tx_efficiency: f64,
    /// Frame duration, seconds.
    pub frame: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        self.validate_without_noise()?;
        check_positive("noise_over_gain", self.noise_over_gain)
    }

    /// Everything except P₀, which calibration solves for.
    pub(crate) fn validate_without_noise(&self) -> Result<()> {
        check_unit("idle_ratio", self.idle_ratio)?;
        check_positive("bandwidth", self.bandwidth)?;
        check_unit("tx_efficiency", self.tx_efficiency)?;
        check_positive("frame", self.frame)
    }

    pub fn busy_time(&self) -> f64 {
        (1.0 - self.idle_ratio) * self.frame
    }

    pub fn idle_time(&self) -> f64 {
        self.idle_ratio * self.frame
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Ambient backscatter rate B_b, bits/s.
    pub backscatter_rate: f64,
    /// Circuit power drawn over the whole frame, watts.
    pub circuit_power: f64,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        check_non_negative("backscatter_rate", self.backscatter_rate)?;
        check_non_negative("circuit_power", self.circuit_power)
    }

    /// E_c for one frame, joules.
    pub fn circuit_energy(&self, frame: f64) -> f64 {
        self.circuit_power * frame
    }
}

/// Full parameter set for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub link: LinkParams,
    pub channel: ChannelParams,
    pub device: DeviceParams,
}

impl Scenario {
    /// FM-broadcast setup: 10 kW at 100 MHz, 6 dBi antennas, 6.7 mi,
    /// δ = κ = 0.6, β = 0.3, W = 100 kHz, B_b = 33 kbps, -35 dBm circuit
    /// power, 1 s frame. P₀ has no published value and must be supplied.
    pub fn paper_defaults(noise_over_gain: f64) -> Scenario {
        let gain = units::dbi_to_linear(GainDbi(6.0));
        Scenario {
            link: LinkParams {
                pt_power: 10e3,
                pt_gain: gain,
                st_gain: gain,
                frequency: 100e6,
                distance: 6.7 * units::METERS_PER_MILE,
                harvest_efficiency: 0.6,
            },
            channel: ChannelParams {
                idle_ratio: 0.3,
                bandwidth: 100e3,
                noise_over_gain,
                tx_efficiency: 0.6,
                frame: 1.0,
            },
            device: DeviceParams {
                backscatter_rate: 33e3,
                circuit_power: units::dbm_to_watts(PowerDbm(-35.0)),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.channel.validate()?;
        self.device.validate()
    }

    pub fn harvested_power(&self) -> Result<f64> {
        linkbudget::harvested_power(&self.link)
    }

    pub fn circuit_energy(&self) -> f64 {
        self.device.circuit_energy(self.channel.frame)
    }

    pub fn with_idle_ratio(mut self, beta: f64) -> Scenario {
        self.channel.idle_ratio = beta;
        self
    }

    pub fn with_noise_over_gain(mut self, p0: f64) -> Scenario {
        self.channel.noise_over_gain = p0;
        self
    }

    pub fn with_backscatter_rate(mut self, rate: f64) -> Scenario {
        self.device.backscatter_rate = rate;
        self
    }

    pub fn with_pt_power(mut self, watts: f64) -> Scenario {
        self.link.pt_power = watts;
        self
    }
}

/// Minimum harvesting fraction α† needed to cover the circuit energy.
///
/// Kept unclamped: values above 1 mean harvesting can never pay for the
/// circuit. `Unreachable` covers the cases where no busy-period energy
/// arrives at all (β = 1 or P_R = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarvestThreshold {
    Finite(f64),
    Unreachable,
}

impl HarvestThreshold {
    pub fn value(self) -> Option<f64> {
        match self {
            HarvestThreshold::Finite(v) => Some(v),
            HarvestThreshold::Unreachable => None,
        }
    }

    /// True when α† ≤ 1, i.e. some α in [0, 1] yields a positive harvest rate.
    pub fn permits_harvest(self) -> bool {
        matches!(self, HarvestThreshold::Finite(v) if v <= 1.0)
    }

    /// α† as a number, `+inf` when unreachable.
    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for HarvestThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarvestThreshold::Finite(v) => write!(f, "{v}"),
            HarvestThreshold::Unreachable => f.write_str("inf"),
        }
    }
}

/// Quantities of the harvest-rate reparameterisation for a fixed μ:
/// `1 + P_tr/P₀ = n + m·α`, with `n + m·α† = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCoefficients {
    /// Harvested RF power, watts.
    pub p_r: f64,
    /// Circuit energy per frame, joules.
    pub e_c: f64,
    pub alpha_dagger: HarvestThreshold,
    pub m: f64,
    pub n: f64,
    /// Active transmission time, seconds.
    pub mu: f64,
}

impl RateCoefficients {
    /// Value of the log argument `n + m·α`.
    pub fn log_argument(&self, alpha: f64) -> f64 {
        self.n + self.m * alpha
    }
}

/// Bits sent by backscattering during the `(1-α)` share of the busy period.
/// No circuit energy is charged: backscatter is self-sustaining.
pub fn rate_backscatter(alpha: f64, channel: &ChannelParams, device: &DeviceParams) -> Result<f64> {
    check_unit("alpha", alpha)?;
    Ok(channel.busy_time() * (1.0 - alpha) * device.backscatter_rate)
}

pub fn alpha_dagger(e_c: f64, beta: f64, p_r: f64, frame: f64) -> Result<HarvestThreshold> {
    check_non_negative("e_c", e_c)?;
    check_unit("idle_ratio", beta)?;
    check_non_negative("p_r", p_r)?;
    check_positive("frame", frame)?;
    let per_unit_alpha = (1.0 - beta) * p_r * frame;
    if per_unit_alpha > 0.0 {
        Ok(HarvestThreshold::Finite(e_c / per_unit_alpha))
    } else {
        Ok(HarvestThreshold::Unreachable)
    }
}

/// Coefficients `m = (1-β)·P_R·frame/(P₀·μ)` and `n = 1 - E_c/(P₀·μ)`.
pub fn coefficients(scenario: &Scenario, mu: f64) -> Result<RateCoefficients> {
    scenario.validate()?;
    let ch = &scenario.channel;
    check(
        mu > 0.0 && mu <= ch.idle_time(),
        "mu",
        mu,
        "must lie in (0, idle_ratio * frame]",
    )?;
    let p_r = scenario.harvested_power()?;
    let e_c = scenario.circuit_energy();
    let scale = ch.noise_over_gain * mu;
    Ok(RateCoefficients {
        p_r,
        e_c,
        alpha_dagger: alpha_dagger(e_c, ch.idle_ratio, p_r, ch.frame)?,
        m: (1.0 - ch.idle_ratio) * p_r * ch.frame / scale,
        n: 1.0 - e_c / scale,
        mu,
    })
}

/// Active transmit power `(E_h - E_c)/μ`. Negative when the harvest does not
/// cover the circuit; callers map that to a zero rate.
pub fn transmit_power(e_h: f64, e_c: f64, mu: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    Ok((e_h - e_c) / mu)
}

/// Harvest-then-transmit bits for an arbitrary transmission time μ.
pub fn rate_harvest_general(mu: f64, alpha: f64, scenario: &Scenario) -> Result<f64> {
    check_unit("alpha", alpha)?;
    let coeffs = coefficients(scenario, mu)?;
    let ch = &scenario.channel;
    if !harvest_active(alpha, coeffs.alpha_dagger) {
        return Ok(0.0);
    }
    let e_h = linkbudget::harvested_energy(alpha, ch.idle_ratio, coeffs.p_r, ch.frame)?;
    let p_tr = transmit_power(e_h, coeffs.e_c, mu)?;
    if p_tr <= 0.0 {
        return Ok(0.0);
    }
    Ok(mu * ch.tx_efficiency * ch.bandwidth * (p_tr / ch.noise_over_gain).ln_1p() / LN_2)
}

/// Harvest-then-transmit bits from precomputed coefficients (μ taken from
/// `coeffs`, normally the whole idle period).
pub fn rate_harvest(alpha: f64, coeffs: &RateCoefficients, channel: &ChannelParams) -> Result<f64> {
    check_unit("alpha", alpha)?;
    let Some(threshold) = coeffs.alpha_dagger.value() else {
        return Ok(0.0);
    };
    if !harvest_active(alpha, coeffs.alpha_dagger) {
        return Ok(0.0);
    }
    // n + m·α = 1 + m·(α - α†)
    let excess = coeffs.m * (alpha - threshold);
    Ok(coeffs.mu * channel.tx_efficiency * channel.bandwidth * excess.ln_1p() / LN_2)
}

fn harvest_active(alpha: f64, threshold: HarvestThreshold) -> bool {
    threshold.permits_harvest() && threshold.value().is_some_and(|t| alpha >= t)
}

/// Coefficients at μ = β·frame, or `None` when β ∈ {0, 1} leaves no idle
/// or no busy time and the harvest branch is identically zero.
pub fn optimal_coefficients(scenario: &Scenario) -> Result<Option<RateCoefficients>> {
    scenario.validate()?;
    let beta = scenario.channel.idle_ratio;
    if beta == 0.0 || beta == 1.0 {
        return Ok(None);
    }
    coefficients(scenario, scenario.channel.idle_time()).map(Some)
}

/// `(R_b, R_h)` at harvest split `alpha`, with R_h at μ = β·frame.
pub fn rate_parts(alpha: f64, scenario: &Scenario) -> Result<(f64, f64)> {
    scenario.validate()?;
    let r_b = rate_backscatter(alpha, &scenario.channel, &scenario.device)?;
    let r_h = match optimal_coefficients(scenario)? {
        Some(coeffs) => rate_harvest(alpha, &coeffs, &scenario.channel)?,
        None => {
            check_unit("alpha", alpha)?;
            0.0
        }
    };
    Ok((r_b, r_h))
}

/// Overall bits per frame `R(α) = R_b + R_h`.
pub fn overall_rate(alpha: f64, scenario: &Scenario) -> Result<f64> {
    let (r_b, r_h) = rate_parts(alpha, scenario)?;
    Ok(r_b + r_h)
}

/// Backscatter-only baseline (α = 0).
pub fn baseline_bm(channel: &ChannelParams, device: &DeviceParams) -> f64 {
    channel.busy_time() * device.backscatter_rate
}

/// Harvest-only baseline (α = 1).
pub fn baseline_hm(scenario: &Scenario) -> Result<f64> {
    overall_rate(1.0, scenario)
}
