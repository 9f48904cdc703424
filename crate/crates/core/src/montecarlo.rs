//! Frame-level Monte-Carlo over a random idle ratio.
//!
//! Each frame draws its own β from an [`IdleDistribution`] and contributes
//! the analytic per-frame rate `R(α; β)` for a fixed policy α. Energy does
//! not carry over between frames. Frames are evaluated in fixed-size chunks
//! whose partial statistics are merged in chunk order, so results do not
//! depend on the number of worker threads.

use rand_distr::{Beta, Distribution};
use rayon::prelude::*;

use crate::error::{check, check_unit, ModelError, Result};
use crate::ratemodel::{overall_rate, Scenario};
use crate::rng::SplitMix64;

const CHUNK_FRAMES: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdleDistribution {
    /// β fixed for every frame.
    Degenerate(f64),
    /// `low` with probability `p_low`, otherwise `high`.
    TwoPoint { low: f64, high: f64, p_low: f64 },
    /// β ~ Beta(a, b).
    BetaLaw { a: f64, b: f64 },
}

impl IdleDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IdleDistribution::Degenerate(beta) => check_unit("idle_ratio", beta),
            IdleDistribution::TwoPoint { low, high, p_low } => {
                check_unit("two_point.low", low)?;
                check_unit("two_point.high", high)?;
                check_unit("two_point.p", p_low)
            }
            IdleDistribution::BetaLaw { a, b } => {
                check(a.is_finite() && a > 0.0, "beta_law.a", a, "must be finite and > 0")?;
                check(b.is_finite() && b > 0.0, "beta_law.b", b, "must be finite and > 0")
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            IdleDistribution::Degenerate(beta) => beta,
            IdleDistribution::TwoPoint { low, high, p_low } => {
                if low == high {
                    low
                } else {
                    p_low * low + (1.0 - p_low) * high
                }
            }
            IdleDistribution::BetaLaw { a, b } => a / (a + b),
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match *self {
            IdleDistribution::Degenerate(beta) => Sampler::Fixed(beta),
            IdleDistribution::TwoPoint { low, high, .. } if low == high => Sampler::Fixed(low),
            IdleDistribution::TwoPoint { low, high, p_low } => Sampler::TwoPoint { low, high, p_low },
            IdleDistribution::BetaLaw { a, b } => Sampler::Beta(Beta::new(a, b).map_err(|_| {
                ModelError::Domain {
                    name: "beta_law",
                    value: a,
                    expected: "shape parameters accepted by Beta(a, b)",
                }
            })?),
        })
    }
}

enum Sampler {
    Fixed(f64),
    TwoPoint { low: f64, high: f64, p_low: f64 },
    Beta(Beta<f64>),
}

impl Sampler {
    fn draw(&self, seed: u64, frame: u64) -> f64 {
        match self {
            Sampler::Fixed(beta) => *beta,
            Sampler::TwoPoint { low, high, p_low } => {
                if SplitMix64::for_frame(seed, frame).next_f64() < *p_low {
                    *low
                } else {
                    *high
                }
            }
            Sampler::Beta(dist) => dist.sample(&mut SplitMix64::for_frame(seed, frame)).clamp(0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Mean bits per frame over the simulated frames.
    pub mean_rate: f64,
    /// Standard error of `mean_rate`.
    pub std_error: f64,
    pub frames: u64,
    pub seed: u64,
    /// `R(α; E[β])`, the deterministic model at the mean idle ratio.
    pub analytic_at_mean: f64,
}

impl SimResult {
    /// `analytic_at_mean - mean_rate`.
    pub fn jensen_gap(&self) -> f64 {
        self.analytic_at_mean - self.mean_rate
    }
}

/// Running count/mean/M2 (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * weight,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * weight,
        }
    }
}

pub fn simulate(
    alpha: f64,
    scenario: &Scenario,
    dist: &IdleDistribution,
    frames: u64,
    seed: u64,
) -> Result<SimResult> {
    check_unit("alpha", alpha)?;
    check(frames >= 1, "frames", frames as f64, "must be >= 1")?;
    scenario.validate()?;
    let sampler = dist.sampler()?;
    let analytic_at_mean = overall_rate(alpha, &scenario.with_idle_ratio(dist.mean()))?;

    let chunks = frames.div_ceil(CHUNK_FRAMES);
    let partials: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Moments> {
            let start = chunk * CHUNK_FRAMES;
            let end = (start + CHUNK_FRAMES).min(frames);
            let mut acc = Moments::default();
            for frame in start..end {
                let beta = sampler.draw(seed, frame);
                acc.push(overall_rate(alpha, &scenario.with_idle_ratio(beta))?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total = partials.into_iter().fold(Moments::default(), Moments::merge);

    let std_error = if total.count > 1 {
        (total.m2.max(0.0) / (total.count - 1) as f64).sqrt() / (total.count as f64).sqrt()
    } else {
        0.0
    };
    Ok(SimResult {
        mean_rate: total.mean,
        std_error,
        frames,
        seed,
        analytic_at_mean,
    })
}

/// Model-at-mean minus simulated mean. The sign is reported, not assumed.
pub fn jensen_gap(
    alpha: f64,
    scenario: &Scenario,
    dist: &IdleDistribution,
    frames: u64,
    seed: u64,
) -> Result<f64> {
    Ok(simulate(alpha, scenario, dist, frames, seed)?.jensen_gap())
}
