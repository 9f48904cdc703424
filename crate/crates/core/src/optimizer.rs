//! Optimal busy-period split between backscattering and harvesting.
//!
//! On `[α†, 1]` the objective `R(α) = (1-β)(1-α)B_b·F + β·F·κW·log₂(n + mα)`
//! is strictly concave, so its maximiser is either the stationary point
//!
//! ```text
//! α̂ = βκW / ((1-β)·B_b·ln 2) − n/m
//! ```
//!
//! or one of the endpoints. Which one is decided by comparing B_b against
//! the slopes at the endpoints (`b_low` at α = 1, `b_high` at α = α†). The
//! best harvesting candidate is finally compared with pure backscatter
//! (α = 0), since R drops by the whole harvest share between 0 and α†.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{ModelError, Result};
use crate::ratemodel::{
    self, baseline_bm, optimal_coefficients, rate_parts, ChannelParams, HarvestThreshold,
    RateCoefficients, Scenario,
};

/// Optimal split reported for the FM-broadcast setup.
pub const PAPER_ALPHA_STAR: f64 = 0.41125;

/// Relative slack under which the harvest candidate wins a tie against pure
/// backscatter.
const TIE_TOLERANCE: f64 = 1e-12;

const GOLDEN_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// α* = 0: harvesting infeasible or dominated.
    PureBackscatter,
    /// α* = α†: harvest exactly the circuit energy.
    HarvestBoundaryLow,
    /// α† < α* < 1.
    Interior,
    /// α* = 1.
    FullHarvest,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::PureBackscatter,
        Regime::HarvestBoundaryLow,
        Regime::Interior,
        Regime::FullHarvest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::PureBackscatter => "pure_backscatter",
            Regime::HarvestBoundaryLow => "harvest_boundary_low",
            Regime::Interior => "interior",
            Regime::FullHarvest => "full_harvest",
        }
    }

    /// Operating regime of a fixed policy `alpha`.
    pub fn of_policy(alpha: f64, threshold: HarvestThreshold) -> Regime {
        match threshold.value() {
            Some(t) if t <= 1.0 && alpha >= t => {
                if alpha == t {
                    Regime::HarvestBoundaryLow
                } else if alpha == 1.0 {
                    Regime::FullHarvest
                } else {
                    Regime::Interior
                }
            }
            _ => Regime::PureBackscatter,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown regime '{s}'"))
    }
}

/// Backscatter-rate bounds, bits/s. For `B_b <= low` full harvesting is
/// optimal on `[α†, 1]`; for `B_b >= high` the lower endpoint α† is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BbThresholds {
    pub low: f64,
    pub high: f64,
}

/// Best split on the harvesting segment `[α†, 1]` before the comparison
/// with pure backscatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub alpha: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffSolution {
    pub alpha_star: f64,
    pub regime: Regime,
    /// Maximum overall bits per frame.
    pub r_max: f64,
    pub r_b_part: f64,
    pub r_h_part: f64,
    pub alpha_dagger: HarvestThreshold,
    /// `None` when harvesting is infeasible or β ∈ {0, 1}.
    pub thresholds: Option<BbThresholds>,
    pub candidate: Option<Candidate>,
}

pub fn bb_thresholds(coeffs: &RateCoefficients, channel: &ChannelParams) -> Result<BbThresholds> {
    let alpha_dagger = match coeffs.alpha_dagger {
        HarvestThreshold::Finite(t) if t <= 1.0 => t,
        other => {
            return Err(ModelError::Infeasible(format!(
                "alpha_dagger = {other} exceeds 1, no B_b thresholds"
            )))
        }
    };
    let beta = channel.idle_ratio;
    let slope = beta * channel.tx_efficiency * channel.bandwidth * coeffs.m / ((1.0 - beta) * LN_2);
    Ok(BbThresholds {
        low: slope / (coeffs.m + coeffs.n),
        high: slope / (coeffs.m * alpha_dagger + coeffs.n),
    })
}

/// Unconstrained stationary point of R on the harvesting branch.
pub fn stationary_alpha(coeffs: &RateCoefficients, scenario: &Scenario) -> f64 {
    let ch = &scenario.channel;
    let beta = ch.idle_ratio;
    beta * ch.tx_efficiency * ch.bandwidth
        / ((1.0 - beta) * scenario.device.backscatter_rate * LN_2)
        - coeffs.n / coeffs.m
}

/// Closed-form maximiser on `[α†, 1]`, or `None` if the harvest branch is
/// identically zero.
pub fn harvest_candidate(scenario: &Scenario) -> Result<Option<Candidate>> {
    let Some(coeffs) = optimal_coefficients(scenario)? else {
        return Ok(None);
    };
    if !coeffs.alpha_dagger.permits_harvest() {
        return Ok(None);
    }
    let alpha_dagger = coeffs.alpha_dagger.as_f64();
    let t = bb_thresholds(&coeffs, &scenario.channel)?;
    let bb = scenario.device.backscatter_rate;
    let candidate = if bb >= t.high {
        Candidate {
            alpha: alpha_dagger,
            regime: Regime::HarvestBoundaryLow,
        }
    } else if bb <= t.low {
        Candidate {
            alpha: 1.0,
            regime: Regime::FullHarvest,
        }
    } else {
        Candidate {
            alpha: stationary_alpha(&coeffs, scenario).clamp(alpha_dagger, 1.0),
            regime: Regime::Interior,
        }
    };
    Ok(Some(candidate))
}

pub fn optimal_alpha_closed_form(scenario: &Scenario) -> Result<TradeoffSolution> {
    scenario.validate()?;
    let coeffs = optimal_coefficients(scenario)?;
    let thresholds = match &coeffs {
        Some(c) if c.alpha_dagger.permits_harvest() => Some(bb_thresholds(c, &scenario.channel)?),
        _ => None,
    };
    let candidate = harvest_candidate(scenario)?;
    finish(scenario, coeffs, thresholds, candidate)
}

/// Golden-section maximiser of a unimodal `f` on `[lo, hi]`. Stops once the
/// bracket is narrower than `tol`.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    // no bracket can shrink below a few ulps
    let tol = tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0));
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_MAX_ITER {
        if b - a <= tol {
            return Ok(0.5 * (a + b));
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if b - a <= tol {
        Ok(0.5 * (a + b))
    } else {
        Err(ModelError::NonConvergence {
            iterations: GOLDEN_MAX_ITER,
        })
    }
}

/// Derivative-free reference solver: golden-section search on the concave
/// segment plus explicit evaluation of 0, α† and 1.
pub fn optimal_alpha_numeric(scenario: &Scenario, tol: f64) -> Result<TradeoffSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(ModelError::Domain {
            name: "tol",
            value: tol,
            expected: "must be > 0",
        });
    }
    scenario.validate()?;
    let coeffs = optimal_coefficients(scenario)?;
    let thresholds = match &coeffs {
        Some(c) if c.alpha_dagger.permits_harvest() => Some(bb_thresholds(c, &scenario.channel)?),
        _ => None,
    };
    let candidate = match &coeffs {
        Some(c) if c.alpha_dagger.permits_harvest() => {
            let alpha_dagger = c.alpha_dagger.as_f64();
            let rate = |a: f64| ratemodel::overall_rate(a, scenario).unwrap_or(f64::NEG_INFINITY);
            let searched = golden_section_max(rate, alpha_dagger, 1.0, tol)?;
            let best = [alpha_dagger, 1.0, searched]
                .into_iter()
                .map(|a| (a, rate(a)))
                .fold((alpha_dagger, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
                .0;
            let regime = if (best - alpha_dagger).abs() <= tol {
                Regime::HarvestBoundaryLow
            } else if (1.0 - best).abs() <= tol {
                Regime::FullHarvest
            } else {
                Regime::Interior
            };
            Some(Candidate {
                alpha: best,
                regime,
            })
        }
        _ => None,
    };
    finish(scenario, coeffs, thresholds, candidate)
}

/// Final comparison against pure backscatter, ties going to the harvest
/// candidate.
fn finish(
    scenario: &Scenario,
    coeffs: Option<RateCoefficients>,
    thresholds: Option<BbThresholds>,
    candidate: Option<Candidate>,
) -> Result<TradeoffSolution> {
    let alpha_dagger = match coeffs {
        Some(c) => c.alpha_dagger,
        None => ratemodel::alpha_dagger(
            scenario.circuit_energy(),
            scenario.channel.idle_ratio,
            scenario.harvested_power()?,
            scenario.channel.frame,
        )?,
    };
    let backscatter_only = baseline_bm(&scenario.channel, &scenario.device);
    let mut solution = TradeoffSolution {
        alpha_star: 0.0,
        regime: Regime::PureBackscatter,
        r_max: backscatter_only,
        r_b_part: backscatter_only,
        r_h_part: 0.0,
        alpha_dagger,
        thresholds,
        candidate,
    };
    if let Some(c) = candidate {
        let (r_b, r_h) = rate_parts(c.alpha, scenario)?;
        let r = r_b + r_h;
        if r >= backscatter_only - TIE_TOLERANCE * r.abs().max(backscatter_only.abs()) {
            solution.alpha_star = c.alpha;
            solution.regime = c.regime;
            solution.r_max = r;
            solution.r_b_part = r_b;
            solution.r_h_part = r_h;
        }
    }
    Ok(solution)
}

/// Closed form and golden-section oracle side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub closed: TradeoffSolution,
    pub numeric: TradeoffSolution,
    /// `|Δr_max| / max(|r_max|)`, zero when both are zero.
    pub rate_rel_diff: f64,
    pub alpha_diff: f64,
    /// False when the maximiser is not numerically unique: the two branches
    /// tie within 1e-9, or R is so flat at α* that double precision cannot
    /// place the argmax to 1e-7.
    pub alpha_well_posed: bool,
}

impl CrossCheck {
    pub fn agrees(&self, rate_tol: f64, alpha_tol: f64) -> bool {
        self.rate_rel_diff <= rate_tol && (!self.alpha_well_posed || self.alpha_diff <= alpha_tol)
    }
}

pub fn cross_check(scenario: &Scenario, tol: f64) -> Result<CrossCheck> {
    let closed = optimal_alpha_closed_form(scenario)?;
    let numeric = optimal_alpha_numeric(scenario, tol)?;
    let scale = closed.r_max.abs().max(numeric.r_max.abs());
    let rate_rel_diff = if scale == 0.0 {
        0.0
    } else {
        (closed.r_max - numeric.r_max).abs() / scale
    };

    let mut alpha_well_posed = true;
    if let (Some(cand), Some(coeffs)) = (closed.candidate, optimal_coefficients(scenario)?) {
        let r_cand = ratemodel::overall_rate(cand.alpha, scenario)?;
        let r_pure = baseline_bm(&scenario.channel, &scenario.device);
        if (r_cand - r_pure).abs() <= 1e-9 * r_cand.abs().max(r_pure.abs()) {
            alpha_well_posed = false;
        } else if closed.regime != Regime::PureBackscatter {
            let ch = &scenario.channel;
            let arg = coeffs.log_argument(closed.alpha_star);
            let curvature = ch.idle_time() * ch.tx_efficiency * ch.bandwidth * coeffs.m * coeffs.m
                / (arg * arg * LN_2);
            let width = (1e-14 * closed.r_max.abs() / curvature).sqrt();
            alpha_well_posed = width < 1e-7;
        }
    }
    Ok(CrossCheck {
        closed,
        numeric,
        rate_rel_diff,
        alpha_diff: (closed.alpha_star - numeric.alpha_star).abs(),
        alpha_well_posed,
    })
}

/// Solves for the P₀ that makes `target_alpha` the interior optimum. The
/// scenario's own `noise_over_gain` is ignored.
pub fn calibrate_p0(target_alpha: f64, scenario: &Scenario) -> Result<f64> {
    if !(target_alpha > 0.0 && target_alpha < 1.0) {
        return Err(ModelError::Calibration {
            reason: format!("target alpha {target_alpha} is not strictly inside (0, 1)"),
            regime: None,
        });
    }
    scenario.link.validate()?;
    scenario.channel.validate_without_noise()?;
    scenario.device.validate()?;
    let ch = &scenario.channel;
    let beta = ch.idle_ratio;
    let bb = scenario.device.backscatter_rate;
    if !(beta > 0.0 && beta < 1.0 && bb > 0.0) {
        return Err(ModelError::Calibration {
            reason: "an interior optimum needs 0 < idle_ratio < 1 and backscatter_rate > 0".into(),
            regime: None,
        });
    }
    let p_r = scenario.harvested_power()?;
    let e_c = scenario.circuit_energy();
    // α̂ = K − n/m with n/m = (P₀·β·F − E_c) / ((1−β)·P_R·F)
    let k = beta * ch.tx_efficiency * ch.bandwidth / ((1.0 - beta) * bb * LN_2);
    let p0 = ((k - target_alpha) * (1.0 - beta) * p_r * ch.frame + e_c) / (beta * ch.frame);
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(ModelError::Calibration {
            reason: format!("target alpha {target_alpha} needs a non-positive P0 ({p0:e} W)"),
            regime: None,
        });
    }
    let solution = optimal_alpha_closed_form(&scenario.with_noise_over_gain(p0))?;
    if solution.regime != Regime::Interior || (solution.alpha_star - target_alpha).abs() > 1e-9 {
        return Err(ModelError::Calibration {
            reason: format!(
                "target alpha {target_alpha} is not an interior optimum (optimizer gives {})",
                solution.alpha_star
            ),
            regime: Some(solution.regime),
        });
    }
    Ok(p0)
}

/// FM-broadcast defaults with P₀ calibrated so that α* = 0.41125.
pub fn calibrated_paper_defaults() -> Result<Scenario> {
    let base = Scenario::paper_defaults(1.0);
    Ok(base.with_noise_over_gain(calibrate_p0(PAPER_ALPHA_STAR, &base)?))
}
