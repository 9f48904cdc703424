//! Free-space (Friis) harvested power at the secondary transmitter.

use std::f64::consts::PI;

use crate::error::{check_non_negative, check_positive, check_unit, Result};
use crate::units;

/// Physical link between the primary transmitter (ambient RF source) and
/// the secondary transmitter's harvesting antenna. All fields are SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Primary transmitter power, watts.
    pub pt_power: f64,
    /// Primary transmitter antenna gain, linear.
    pub pt_gain: f64,
    /// Secondary transmitter antenna gain, linear.
    pub st_gain: f64,
    /// Carrier frequency, hertz.
    pub frequency: f64,
    /// Primary-to-secondary distance, meters.
    pub distance: f64,
    /// RF-to-DC harvesting efficiency in [0, 1].
    pub harvest_efficiency: f64,
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("pt_power", self.pt_power)?;
        check_positive("pt_gain", self.pt_gain)?;
        check_positive("st_gain", self.st_gain)?;
        check_positive("frequency", self.frequency)?;
        check_positive("distance", self.distance)?;
        check_unit("harvest_efficiency", self.harvest_efficiency)
    }

    pub fn wavelength(&self) -> Result<f64> {
        units::wavelength_from_frequency(self.frequency)
    }
}

/// Harvested power P_R = δ·P_T·G_T·G_R·λ² / (4πd)², watts.
pub fn harvested_power(link: &LinkParams) -> Result<f64> {
    link.validate()?;
    let lambda = link.wavelength()?;
    let spreading = 4.0 * PI * link.distance;
    Ok(link.harvest_efficiency * link.pt_power * link.pt_gain * link.st_gain * lambda * lambda
        / (spreading * spreading))
}

/// Energy harvested over the fraction `alpha` of the busy period
/// `(1 - beta) * frame`, joules.
pub fn harvested_energy(alpha: f64, beta: f64, p_r: f64, frame: f64) -> Result<f64> {
    check_unit("alpha", alpha)?;
    check_unit("idle_ratio", beta)?;
    check_non_negative("p_r", p_r)?;
    check_positive("frame", frame)?;
    Ok(alpha * (1.0 - beta) * p_r * frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{dbi_to_linear, miles_to_meters, GainDbi};
    use proptest::prelude::*;

    fn defaults() -> LinkParams {
        LinkParams {
            pt_power: 10e3,
            pt_gain: dbi_to_linear(GainDbi(6.0)),
            st_gain: dbi_to_linear(GainDbi(6.0)),
            frequency: 100e6,
            distance: miles_to_meters(6.7).unwrap(),
            harvest_efficiency: 0.6,
        }
    }

    #[test]
    fn factors_cancel_to_one_watt() {
        // λ = 4π  ⇒  f = c / 4π
        let link = LinkParams {
            pt_power: 1.0,
            pt_gain: 1.0,
            st_gain: 1.0,
            frequency: units::SPEED_OF_LIGHT / (4.0 * PI),
            distance: 1.0,
            harvest_efficiency: 1.0,
        };
        assert!((harvested_power(&link).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_efficiency_harvests_nothing() {
        let link = LinkParams {
            harvest_efficiency: 0.0,
            ..defaults()
        };
        assert_eq!(harvested_power(&link).unwrap(), 0.0);
    }

    #[test]
    fn default_link_power() {
        // 40-digit evaluation: 4.655062886849718e-5 W
        let p = harvested_power(&defaults()).unwrap();
        assert!(((p - 4.655_06e-5) / 4.655_06e-5).abs() < 5e-6, "{p}");
        assert!(((p - 4.655_062_886_849_718e-5) / p).abs() < 1e-12);
    }

    #[test]
    fn invalid_links_rejected() {
        for bad in [
            LinkParams { pt_power: 0.0, ..defaults() },
            LinkParams { distance: 0.0, ..defaults() },
            LinkParams { frequency: -1.0, ..defaults() },
            LinkParams { harvest_efficiency: 1.5, ..defaults() },
            LinkParams { st_gain: 0.0, ..defaults() },
        ] {
            assert!(harvested_power(&bad).is_err());
        }
    }

    #[test]
    fn energy_examples() {
        assert_eq!(harvested_energy(0.0, 0.3, 4.65e-5, 1.0).unwrap(), 0.0);
        assert_eq!(harvested_energy(0.7, 1.0, 4.65e-5, 1.0).unwrap(), 0.0);
        let e = harvested_energy(1.0, 0.3, 4.65e-5, 1.0).unwrap();
        assert!((e - 0.7 * 4.65e-5).abs() < 1e-18);
        assert!(harvested_energy(1.2, 0.3, 1.0, 1.0).is_err());
        assert!(harvested_energy(0.5, -0.1, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn friis_scaling(scale in 0.01f64..100.0, d in 10.0f64..1e5) {
            let base = LinkParams { distance: d, ..defaults() };
            let p = harvested_power(&base).unwrap();

            let louder = LinkParams { pt_power: base.pt_power * scale, ..base };
            let p_louder = harvested_power(&louder).unwrap();
            prop_assert!(((p_louder - scale * p) / p_louder).abs() < 1e-12);

            let eff = LinkParams { harvest_efficiency: 0.5 * base.harvest_efficiency, ..base };
            prop_assert!(((harvested_power(&eff).unwrap() - 0.5 * p) / p).abs() < 1e-12);

            let closer = LinkParams { distance: d / 2.0, ..base };
            prop_assert!(((harvested_power(&closer).unwrap() - 4.0 * p) / p).abs() < 1e-12);
        }

        #[test]
        fn energy_linear(alpha in 0.0f64..=1.0, beta in 0.0f64..=1.0, p_r in 1e-9f64..1.0) {
            let e = harvested_energy(alpha, beta, p_r, 1.0).unwrap();
            let unit = harvested_energy(1.0, 0.0, p_r, 1.0).unwrap();
            prop_assert!((e - alpha * (1.0 - beta) * unit).abs() <= 1e-15 * unit);
        }
    }
}
