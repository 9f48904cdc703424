//! Parameter sweeps behind the α*-and-rate figures.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{check, ModelError, Result};
use crate::optimizer::{optimal_alpha_closed_form, Regime};
use crate::ratemodel::{self, baseline_bm, baseline_hm, overall_rate, HarvestThreshold, Scenario};

/// Swept quantity, in the units used on the figure axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    /// β, fraction of the frame.
    IdleRatio,
    /// Primary transmitter power, kW.
    PtPowerKw,
    /// Backscatter rate, kbps.
    BackscatterRateKbps,
    /// Fixed policy α; rows report R(α) instead of the optimum.
    Alpha,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [
        SweepParam::IdleRatio,
        SweepParam::PtPowerKw,
        SweepParam::BackscatterRateKbps,
        SweepParam::Alpha,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::IdleRatio => "beta",
            SweepParam::PtPowerKw => "pt_kw",
            SweepParam::BackscatterRateKbps => "bb_kbps",
            SweepParam::Alpha => "alpha",
        }
    }

    fn apply(self, base: &Scenario, value: f64) -> Scenario {
        match self {
            SweepParam::IdleRatio => base.with_idle_ratio(value),
            SweepParam::PtPowerKw => base.with_pt_power(value * 1e3),
            SweepParam::BackscatterRateKbps => base.with_backscatter_rate(value * 1e3),
            SweepParam::Alpha => *base,
        }
    }

    fn check_value(self, value: f64) -> Result<()> {
        match self {
            SweepParam::IdleRatio | SweepParam::Alpha => check(
                (0.0..=1.0).contains(&value),
                self.as_str(),
                value,
                "must lie in [0, 1]",
            ),
            SweepParam::PtPowerKw => check(value > 0.0, "pt_kw", value, "must be > 0"),
            SweepParam::BackscatterRateKbps => check(value >= 0.0, "bb_kbps", value, "must be >= 0"),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                format!("unknown sweep parameter '{s}' (expected one of: beta, pt_kw, bb_kbps, alpha)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: Scenario,
}

impl SweepSpec {
    /// Uniform grid including both endpoints.
    pub fn grid(&self) -> Result<Vec<f64>> {
        check(self.steps >= 2, "steps", self.steps as f64, "must be >= 2")?;
        check(
            self.from.is_finite() && self.to.is_finite() && self.from < self.to,
            "from",
            self.from,
            "must be finite and < to",
        )?;
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub swept_value: f64,
    pub alpha_star: f64,
    pub regime: Regime,
    pub r_max: f64,
    pub r_bm: f64,
    pub r_hm: f64,
    pub alpha_dagger: HarvestThreshold,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let grid = spec.grid()?;
    grid.par_iter()
        .enumerate()
        .map(|(index, &value)| {
            sweep_point(spec, value).map_err(|e| ModelError::GridPoint {
                index,
                value,
                source: Box::new(e),
            })
        })
        .collect()
}

fn sweep_point(spec: &SweepSpec, value: f64) -> Result<SweepRow> {
    spec.param.check_value(value)?;
    let scenario = spec.param.apply(&spec.base, value);
    scenario.validate()?;
    let r_bm = baseline_bm(&scenario.channel, &scenario.device);
    let r_hm = baseline_hm(&scenario)?;
    if spec.param == SweepParam::Alpha {
        let threshold = threshold_of(&scenario)?;
        return Ok(SweepRow {
            swept_value: value,
            alpha_star: value,
            regime: Regime::of_policy(value, threshold),
            r_max: overall_rate(value, &scenario)?,
            r_bm,
            r_hm,
            alpha_dagger: threshold,
        });
    }
    let sol = optimal_alpha_closed_form(&scenario)?;
    Ok(SweepRow {
        swept_value: value,
        alpha_star: sol.alpha_star,
        regime: sol.regime,
        r_max: sol.r_max,
        r_bm,
        r_hm,
        alpha_dagger: sol.alpha_dagger,
    })
}

fn threshold_of(scenario: &Scenario) -> Result<HarvestThreshold> {
    ratemodel::alpha_dagger(
        scenario.circuit_energy(),
        scenario.channel.idle_ratio,
        scenario.harvested_power()?,
        scenario.channel.frame,
    )
}

/// `(α, R(α))` on a uniform grid over [0, 1].
pub fn alpha_profile(base: &Scenario, steps: usize) -> Result<Vec<(f64, f64)>> {
    check(steps >= 2, "steps", steps as f64, "must be >= 2")?;
    base.validate()?;
    let last = (steps - 1) as f64;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let alpha = if i == steps - 1 { 1.0 } else { i as f64 / last };
            overall_rate(alpha, base).map(|r| (alpha, r))
        })
        .collect()
}

/// First grid point of each run with a new regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knee {
    pub swept_value: f64,
    pub from: Regime,
    pub to: Regime,
}

pub fn regime_changes(rows: &[SweepRow]) -> Vec<Knee> {
    rows.windows(2)
        .filter(|w| w[0].regime != w[1].regime)
        .map(|w| Knee {
            swept_value: w[1].swept_value,
            from: w[0].regime,
            to: w[1].regime,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{calibrated_paper_defaults, PAPER_ALPHA_STAR};

    fn spec(param: SweepParam, from: f64, to: f64, steps: usize) -> SweepSpec {
        SweepSpec {
            param,
            from,
            to,
            steps,
            base: calibrated_paper_defaults().unwrap(),
        }
    }

    fn dominates(rows: &[SweepRow]) {
        for r in rows {
            assert!(r.r_max >= r.r_bm.max(r.r_hm) - 1e-12 * r.r_max, "{r:?}");
        }
    }

    #[test]
    fn grid_is_uniform_with_endpoints() {
        let g = spec(SweepParam::IdleRatio, 0.1, 0.9, 17).grid().unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[16], 0.9);
        assert!((g[1] - 0.15).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(spec(SweepParam::IdleRatio, 0.1, 0.9, 1).grid().is_err());
        assert!(spec(SweepParam::IdleRatio, 0.9, 0.1, 5).grid().is_err());
    }

    #[test]
    fn idle_ratio_sweep_climbs_to_full_harvest() {
        let rows = run_sweep(&spec(SweepParam::IdleRatio, 0.1, 0.9, 17)).unwrap();
        dominates(&rows);
        assert!(rows.windows(2).all(|w| w[1].alpha_star >= w[0].alpha_star));
        let first_one = rows.iter().position(|r| r.alpha_star == 1.0).unwrap();
        assert!(rows[first_one..].iter().all(|r| r.alpha_star == 1.0));
        let at_03 = rows.iter().find(|r| (r.swept_value - 0.3).abs() < 1e-12).unwrap();
        assert!((at_03.alpha_star - PAPER_ALPHA_STAR).abs() < 1e-9);
    }

    #[test]
    fn pt_power_sweep_starts_at_backscatter() {
        let rows = run_sweep(&spec(SweepParam::PtPowerKw, 5.0, 50.0, 46)).unwrap();
        dominates(&rows);
        assert_eq!(rows[0].alpha_star, 0.0);
        let knee = rows.iter().position(|r| r.alpha_star > 0.0).unwrap();
        assert!(rows[..knee].iter().all(|r| r.alpha_star == 0.0));
        assert!(rows[knee..].windows(2).all(|w| w[1].alpha_star >= w[0].alpha_star));
    }

    #[test]
    fn backscatter_rate_sweep_falls_from_one_to_zero() {
        let rows = run_sweep(&spec(SweepParam::BackscatterRateKbps, 10.0, 60.0, 51)).unwrap();
        dominates(&rows);
        assert_eq!(rows[0].alpha_star, 1.0);
        assert_eq!(rows.last().unwrap().alpha_star, 0.0);
        assert!(rows.windows(2).all(|w| w[1].alpha_star <= w[0].alpha_star));
        let knees = regime_changes(&rows);
        assert_eq!(knees.first().unwrap().from, Regime::FullHarvest);
        assert_eq!(knees.last().unwrap().to, Regime::PureBackscatter);
    }

    #[test]
    fn alpha_sweep_reports_policy_rates() {
        let s = spec(SweepParam::Alpha, 0.0, 1.0, 11);
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows[0].regime, Regime::PureBackscatter);
        assert_eq!(rows[10].regime, Regime::FullHarvest);
        assert_eq!(rows[4].regime, Regime::Interior);
        for r in &rows {
            assert_eq!(r.r_max, overall_rate(r.swept_value, &s.base).unwrap());
        }
    }

    #[test]
    fn out_of_domain_point_is_named() {
        let err = run_sweep(&spec(SweepParam::IdleRatio, 0.5, 1.5, 3)).unwrap_err();
        match err {
            ModelError::GridPoint { index, value, .. } => {
                assert_eq!(index, 2);
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_matches_optimizer() {
        let base = calibrated_paper_defaults().unwrap();
        let sol = optimal_alpha_closed_form(&base).unwrap();
        let profile = alpha_profile(&base, 10_001).unwrap();
        assert_eq!(profile[0], (0.0, baseline_bm(&base.channel, &base.device)));
        assert_eq!(profile.last().unwrap().0, 1.0);
        let (arg, best) = profile
            .iter()
            .cloned()
            .fold((0.0, f64::MIN), |acc, p| if p.1 > acc.1 { p } else { acc });
        assert!(best <= sol.r_max * (1.0 + 1e-12));
        assert!((arg - sol.alpha_star).abs() <= 1e-4);
        assert!(alpha_profile(&base, 1).is_err());
    }
}
