use proptest::prelude::*;

use crate::linkbudget::LinkParams;
use crate::ratemodel::{ChannelParams, DeviceParams, Scenario};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Valid scenarios with 0 < β < 1, mixing feasible and infeasible harvest.
pub fn arb_scenario() -> impl Strategy<Value = Scenario> {
    let link = (
        log_uniform(1e3, 1e5),
        1.0f64..10.0,
        1.0f64..10.0,
        log_uniform(5e7, 1e9),
        log_uniform(1e3, 3e4),
        0.1f64..=1.0,
    )
        .prop_map(|(pt_power, pt_gain, st_gain, frequency, distance, harvest_efficiency)| LinkParams {
            pt_power,
            pt_gain,
            st_gain,
            frequency,
            distance,
            harvest_efficiency,
        });
    let channel = (0.02f64..0.98, log_uniform(1e4, 1e6), log_uniform(1e-7, 1e-3), 0.1f64..=1.0, 0.5f64..2.0)
        .prop_map(|(idle_ratio, bandwidth, noise_over_gain, tx_efficiency, frame)| ChannelParams {
            idle_ratio,
            bandwidth,
            noise_over_gain,
            tx_efficiency,
            frame,
        });
    let device = (0.0f64..1e5, log_uniform(1e-9, 1e-5)).prop_map(|(backscatter_rate, circuit_power)| {
        DeviceParams {
            backscatter_rate,
            circuit_power,
        }
    });
    (link, channel, device).prop_map(|(link, channel, device)| Scenario { link, channel, device })
}
