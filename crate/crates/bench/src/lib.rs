//! Fixtures shared by the criterion benches.

use backscatter_core::rng::SplitMix64;
use backscatter_core::{calibrated_paper_defaults, Scenario};

/// `count` deterministic perturbations of the calibrated FM defaults.
pub fn scenario_batch(count: usize, seed: u64) -> Vec<Scenario> {
    let base = calibrated_paper_defaults().expect("defaults calibrate");
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let mut s = base.with_idle_ratio(0.05 + 0.9 * rng.next_f64());
            s.link.pt_power *= 0.5 + 4.5 * rng.next_f64();
            s.device.backscatter_rate *= 0.3 + 1.5 * rng.next_f64();
            s
        })
        .collect()
}
