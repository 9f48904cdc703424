//! Scenario files: `[link]`, `[channel]` and `[device]` sections of
//! `key = value` lines, with the unit spelled out in every key name.
//! `#` and `;` start comments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use backscatter_core::units::{self, GainDbi, PowerDbm};
use backscatter_core::{ChannelParams, DeviceParams, LinkParams, Scenario};

/// The bundled FM-broadcast scenario.
pub const PAPER_DEFAULTS: &str = include_str!("../scenarios/paper-defaults.ini");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Range {
    Finite,
    Positive,
    NonNegative,
    Unit,
}

impl Range {
    fn admits(self, v: f64) -> bool {
        match self {
            Range::Finite => true,
            Range::Positive => v > 0.0,
            Range::NonNegative => v >= 0.0,
            Range::Unit => (0.0..=1.0).contains(&v),
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Range::Finite => "a finite number",
            Range::Positive => "> 0",
            Range::NonNegative => ">= 0",
            Range::Unit => "in [0, 1]",
        }
    }
}

struct KeySpec {
    section: &'static str,
    key: &'static str,
    range: Range,
    required: bool,
}

const fn key(section: &'static str, key: &'static str, range: Range, required: bool) -> KeySpec {
    KeySpec {
        section,
        key,
        range,
        required,
    }
}

const KEYS: &[KeySpec] = &[
    key("link", "pt_power_kw", Range::Positive, true),
    key("link", "pt_gain_dbi", Range::Finite, true),
    key("link", "st_gain_dbi", Range::Finite, true),
    key("link", "frequency_mhz", Range::Positive, true),
    key("link", "distance_miles", Range::Positive, false),
    key("link", "distance_m", Range::Positive, false),
    key("link", "harvest_efficiency", Range::Unit, true),
    key("channel", "idle_ratio", Range::Unit, true),
    key("channel", "bandwidth_khz", Range::Positive, true),
    key("channel", "p0_dbm", Range::Finite, false),
    key("channel", "tx_efficiency", Range::Unit, true),
    key("channel", "frame_s", Range::Positive, true),
    key("device", "backscatter_rate_kbps", Range::NonNegative, true),
    key("device", "circuit_power_dbm", Range::Finite, true),
];

const SECTIONS: [&str; 3] = ["link", "channel", "device"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Miles(f64),
    Meters(f64),
}

impl Distance {
    pub fn meters(self) -> f64 {
        match self {
            Distance::Miles(mi) => mi * units::METERS_PER_MILE,
            Distance::Meters(m) => m,
        }
    }
}

/// Parsed scenario, still in the file's units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub pt_power_kw: f64,
    pub pt_gain_dbi: f64,
    pub st_gain_dbi: f64,
    pub frequency_mhz: f64,
    pub distance: Distance,
    pub harvest_efficiency: f64,
    pub idle_ratio: f64,
    pub bandwidth_khz: f64,
    pub p0_dbm: Option<f64>,
    pub tx_efficiency: f64,
    pub frame_s: f64,
    pub backscatter_rate_kbps: f64,
    pub circuit_power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "{key}: ")?;
        }
        f.write_str(&self.message)
    }
}

/// Every problem found in a scenario file, in file order followed by
/// missing keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub source_name: String,
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid scenario {}:", self.source_name)?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    pub fn paper_defaults() -> ScenarioConfig {
        ScenarioConfig::parse(PAPER_DEFAULTS, "paper-defaults").expect("bundled scenario is valid")
    }

    pub fn load(path: &Path) -> Result<ScenarioConfig, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source_name: name.clone(),
            issues: vec![ConfigIssue {
                line: None,
                key: None,
                message: format!("cannot read file: {e}"),
            }],
        })?;
        ScenarioConfig::parse(&text, &name)
    }

    pub fn parse(text: &str, source_name: &str) -> Result<ScenarioConfig, ConfigError> {
        let mut issues = Vec::new();
        let mut values: BTreeMap<&'static str, (usize, f64)> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut section: Option<&str> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let mut issue = |key: Option<&str>, message: String| {
                issues.push(ConfigIssue {
                    line: Some(line_no),
                    key: key.map(str::to_owned),
                    message,
                })
            };
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                match SECTIONS.iter().find(|s| **s == name) {
                    Some(s) => section = Some(s),
                    None => {
                        section = None;
                        issue(None, format!("unknown section [{name}]"));
                    }
                }
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                issue(None, format!("expected `key = value`, found `{line}`"));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            let Some(current) = section else {
                issue(Some(k), "key outside of a known section".into());
                continue;
            };
            let Some(spec) = KEYS.iter().find(|s| s.key == k) else {
                issue(Some(k), "unknown key".into());
                continue;
            };
            if spec.section != current {
                issue(Some(k), format!("belongs in [{}], not [{current}]", spec.section));
                continue;
            }
            seen.insert(spec.key);
            let value = match v.parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => {
                    issue(Some(k), format!("`{v}` is not a finite number"));
                    continue;
                }
            };
            if !spec.range.admits(value) {
                issue(Some(k), format!("{value} out of range, must be {}", spec.range.describe()));
                continue;
            }
            if let Some((first, _)) = values.get(spec.key) {
                issue(Some(k), format!("duplicate key (first set on line {first})"));
                continue;
            }
            values.insert(spec.key, (line_no, value));
        }

        match (values.get("distance_miles"), values.get("distance_m")) {
            (Some(_), Some((line, _))) => issues.push(ConfigIssue {
                line: Some(*line),
                key: Some("distance_m".into()),
                message: "duplicate distance: give exactly one of distance_miles, distance_m".into(),
            }),
            (None, None) if !seen.contains("distance_miles") && !seen.contains("distance_m") => issues.push(ConfigIssue {
                line: None,
                key: Some("distance_miles".into()),
                message: "missing key in [link] (or distance_m)".into(),
            }),
            _ => {}
        }
        for spec in KEYS.iter().filter(|s| s.required && !seen.contains(s.key)) {
            issues.push(ConfigIssue {
                line: None,
                key: Some(spec.key.into()),
                message: format!("missing key in [{}]", spec.section),
            });
        }
        if !issues.is_empty() {
            return Err(ConfigError {
                source_name: source_name.into(),
                issues,
            });
        }

        let get = |k: &str| values[k].1;
        let distance = match values.get("distance_miles") {
            Some((_, mi)) => Distance::Miles(*mi),
            None => Distance::Meters(get("distance_m")),
        };
        Ok(ScenarioConfig {
            pt_power_kw: get("pt_power_kw"),
            pt_gain_dbi: get("pt_gain_dbi"),
            st_gain_dbi: get("st_gain_dbi"),
            frequency_mhz: get("frequency_mhz"),
            distance,
            harvest_efficiency: get("harvest_efficiency"),
            idle_ratio: get("idle_ratio"),
            bandwidth_khz: get("bandwidth_khz"),
            p0_dbm: values.get("p0_dbm").map(|(_, v)| *v),
            tx_efficiency: get("tx_efficiency"),
            frame_s: get("frame_s"),
            backscatter_rate_kbps: get("backscatter_rate_kbps"),
            circuit_power_dbm: get("circuit_power_dbm"),
        })
    }

    /// P₀ from the file, watts.
    pub fn p0_watts(&self) -> Option<f64> {
        self.p0_dbm.map(|dbm| units::dbm_to_watts(PowerDbm(dbm)))
    }

    /// SI scenario with the given P₀ (watts).
    pub fn scenario(&self, noise_over_gain: f64) -> Scenario {
        Scenario {
            link: LinkParams {
                pt_power: self.pt_power_kw * 1e3,
                pt_gain: units::dbi_to_linear(GainDbi(self.pt_gain_dbi)),
                st_gain: units::dbi_to_linear(GainDbi(self.st_gain_dbi)),
                frequency: self.frequency_mhz * 1e6,
                distance: self.distance.meters(),
                harvest_efficiency: self.harvest_efficiency,
            },
            channel: ChannelParams {
                idle_ratio: self.idle_ratio,
                bandwidth: self.bandwidth_khz * 1e3,
                noise_over_gain,
                tx_efficiency: self.tx_efficiency,
                frame: self.frame_s,
            },
            device: DeviceParams {
                backscatter_rate: self.backscatter_rate_kbps * 1e3,
                circuit_power: units::dbm_to_watts(PowerDbm(self.circuit_power_dbm)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issue_keys(err: &ConfigError) -> Vec<&str> {
        err.issues.iter().filter_map(|i| i.key.as_deref()).collect()
    }

    #[test]
    fn bundled_defaults() {
        let c = ScenarioConfig::paper_defaults();
        assert_eq!(c.pt_power_kw, 10.0);
        assert_eq!(c.backscatter_rate_kbps, 33.0);
        assert_eq!(c.pt_gain_dbi, 6.0);
        assert_eq!(c.st_gain_dbi, 6.0);
        assert_eq!(c.circuit_power_dbm, -35.0);
        assert_eq!(c.distance, Distance::Miles(6.7));
        assert_eq!(c.harvest_efficiency, 0.6);
        assert_eq!(c.tx_efficiency, 0.6);
        assert_eq!(c.idle_ratio, 0.3);
        assert_eq!(c.bandwidth_khz, 100.0);
        assert_eq!(c.frequency_mhz, 100.0);
        assert_eq!(c.p0_dbm, None);
        assert_eq!(c.scenario(1e-4), Scenario::paper_defaults(1e-4));
    }

    #[test]
    fn empty_file_lists_every_missing_key() {
        let err = ScenarioConfig::parse("", "empty").unwrap_err();
        let keys = issue_keys(&err);
        for k in [
            "pt_power_kw",
            "pt_gain_dbi",
            "st_gain_dbi",
            "frequency_mhz",
            "distance_miles",
            "harvest_efficiency",
            "idle_ratio",
            "bandwidth_khz",
            "tx_efficiency",
            "frame_s",
            "backscatter_rate_kbps",
            "circuit_power_dbm",
        ] {
            assert!(keys.contains(&k), "{k} not reported: {err}");
        }
        assert!(!keys.contains(&"p0_dbm"));
    }

    #[test]
    fn range_error_names_key_and_line() {
        let text = PAPER_DEFAULTS.replace("idle_ratio = 0.3", "idle_ratio = 1.5");
        let err = ScenarioConfig::parse(&text, "t").unwrap_err();
        assert_eq!(err.issues.len(), 1);
        let issue = &err.issues[0];
        assert_eq!(issue.key.as_deref(), Some("idle_ratio"));
        let expected_line = text.lines().position(|l| l.starts_with("idle_ratio")).unwrap() + 1;
        assert_eq!(issue.line, Some(expected_line));
        assert!(issue.message.contains("out of range"));
    }

    #[test]
    fn unknown_and_misplaced_keys_rejected() {
        let text = format!("{PAPER_DEFAULTS}\n[device]\nbogus_key = 1\n");
        let err = ScenarioConfig::parse(&text, "t").unwrap_err();
        assert_eq!(issue_keys(&err), vec!["bogus_key"]);

        let text = PAPER_DEFAULTS.replace("frame_s = 1", "").replace(
            "circuit_power_dbm = -35",
            "circuit_power_dbm = -35\nframe_s = 1",
        );
        let err = ScenarioConfig::parse(&text, "t").unwrap_err();
        assert!(err.issues.iter().any(|i| i.message.contains("belongs in [channel]")));

        let err = ScenarioConfig::parse("[radio]\nx = 1\n", "t").unwrap_err();
        assert!(err.issues[0].message.contains("unknown section"));
    }

    #[test]
    fn distance_must_be_given_once() {
        let both = PAPER_DEFAULTS.replace("distance_miles = 6.7", "distance_miles = 6.7\ndistance_m = 10000");
        let err = ScenarioConfig::parse(&both, "t").unwrap_err();
        assert!(err.issues[0].message.contains("duplicate distance"));

        let meters = PAPER_DEFAULTS.replace("distance_miles = 6.7", "distance_m = 10782.6048");
        let c = ScenarioConfig::parse(&meters, "t").unwrap();
        assert_eq!(c.distance.meters(), 10_782.604_8);
    }

    #[test]
    fn duplicates_and_garbage() {
        let dup = PAPER_DEFAULTS.replace("frame_s = 1", "frame_s = 1\nframe_s = 2");
        let err = ScenarioConfig::parse(&dup, "t").unwrap_err();
        assert!(err.issues[0].message.contains("duplicate key"));

        let nan = PAPER_DEFAULTS.replace("frame_s = 1", "frame_s = NaN");
        assert!(ScenarioConfig::parse(&nan, "t").is_err());
        let word = PAPER_DEFAULTS.replace("frame_s = 1", "frame_s = one");
        assert!(ScenarioConfig::parse(&word, "t").is_err());
        let no_eq = PAPER_DEFAULTS.replace("frame_s = 1", "frame_s 1");
        assert!(ScenarioConfig::parse(&no_eq, "t").is_err());
    }

    #[test]
    fn optional_p0() {
        let text = PAPER_DEFAULTS.replace("frame_s = 1", "frame_s = 1\np0_dbm = -11.05 ; calibrated");
        let c = ScenarioConfig::parse(&text, "t").unwrap();
        assert_eq!(c.p0_dbm, Some(-11.05));
        assert!((c.p0_watts().unwrap() - 10f64.powf(-1.105) / 1000.0).abs() < 1e-18);
    }
}
