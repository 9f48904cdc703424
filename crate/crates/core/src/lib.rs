//! Time allocation between ambient backscatter and harvest-then-transmit for
//! an RF-powered cognitive radio secondary link.
//!
//! While the primary channel is busy the secondary transmitter either
//! backscatters the primary signal or harvests its energy; the harvest funds
//! an active transmission while the channel is idle. [`optimizer`] finds the
//! split that maximises the bits delivered per frame.

pub mod error;
pub mod experiments;
pub mod linkbudget;
pub mod montecarlo;
pub mod optimizer;
pub mod ratemodel;
pub mod rng;
pub mod units;

#[cfg(test)]
mod testutil;

pub use error::{ModelError, Result};
pub use experiments::{alpha_profile, regime_changes, run_sweep, Knee, SweepParam, SweepRow, SweepSpec};
pub use linkbudget::LinkParams;
pub use montecarlo::{simulate, IdleDistribution, SimResult};
pub use optimizer::{
    calibrate_p0, calibrated_paper_defaults, cross_check, CrossCheck, optimal_alpha_closed_form, optimal_alpha_numeric,
    BbThresholds, Candidate, Regime, TradeoffSolution, PAPER_ALPHA_STAR,
};
pub use ratemodel::{
    overall_rate, ChannelParams, DeviceParams, HarvestThreshold, RateCoefficients, Scenario,
};
pub use units::{GainDbi, PowerDbm};
