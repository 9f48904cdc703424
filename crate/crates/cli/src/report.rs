//! Machine-readable output. Floats are written with 17 significant digits
//! so every value parses back to the same `f64`.

use std::fmt::Write as _;

use backscatter_core::{HarvestThreshold, Regime, SweepRow};

pub const SWEEP_HEADER: &str = "swept_value,alpha_star,regime,r_max,r_bm,r_hm,alpha_dagger";
pub const PROFILE_HEADER: &str = "alpha,rate";

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

fn fmt_threshold(t: HarvestThreshold) -> String {
    fmt_f64(t.as_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// `key=value` lines
    #[default]
    Text,
    /// header row plus one data row
    Csv,
}

/// Ordered key/value report rendered as `key=value` lines or a CSV row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    fields: Vec<(&'static str, String)>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn num(mut self, key: &'static str, value: f64) -> Report {
        self.fields.push((key, fmt_f64(value)));
        self
    }

    pub fn text(mut self, key: &'static str, value: impl Into<String>) -> Report {
        self.fields.push((key, value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.fields.iter().fold(String::new(), |mut out, (k, v)| {
                let _ = writeln!(out, "{k}={v}");
                out
            }),
            Format::Csv => {
                let header: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
                let row: Vec<&str> = self.fields.iter().map(|(_, v)| v.as_str()).collect();
                format!("{}\n{}\n", header.join(","), row.join(","))
            }
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.swept_value),
            fmt_f64(r.alpha_star),
            r.regime,
            fmt_f64(r.r_max),
            fmt_f64(r.r_bm),
            fmt_f64(r.r_hm),
            fmt_threshold(r.alpha_dagger),
        );
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_HEADER) {
        return Err("missing sweep header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(format!("row {}: expected 7 columns", i + 1));
            }
            let num = |j: usize| parse_f64(cols[j]).ok_or_else(|| format!("row {}: bad number `{}`", i + 1, cols[j]));
            let dagger = num(6)?;
            Ok(SweepRow {
                swept_value: num(0)?,
                alpha_star: num(1)?,
                regime: cols[2].parse::<Regime>()?,
                r_max: num(3)?,
                r_bm: num(4)?,
                r_hm: num(5)?,
                alpha_dagger: if dagger.is_finite() {
                    HarvestThreshold::Finite(dagger)
                } else {
                    HarvestThreshold::Unreachable
                },
            })
        })
        .collect()
}

pub fn profile_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for (alpha, rate) in points {
        let _ = writeln!(out, "{},{}", fmt_f64(*alpha), fmt_f64(*rate));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.41125), "4.1125000000000000e-1");
        assert_eq!(fmt_f64(23_100.0), "2.3100000000000000e4");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(parse_f64("inf"), Some(f64::INFINITY));
    }

    #[test]
    fn report_formats() {
        let r = Report::new().num("a", 1.0).text("regime", "interior");
        assert_eq!(r.render(Format::Text), "a=1.0000000000000000e0\nregime=interior\n");
        assert_eq!(r.render(Format::Csv), "a,regime\n1.0000000000000000e0,interior\n");
        assert_eq!(r.get("regime"), Some("interior"));
    }

    fn arb_row() -> impl Strategy<Value = SweepRow> {
        (
            any::<f64>().prop_filter("finite", |x| x.is_finite()),
            0.0f64..=1.0,
            0usize..4,
            0.0f64..1e9,
            0.0f64..1e9,
            0.0f64..1e9,
            prop::option::of(0.0f64..10.0),
        )
            .prop_map(|(v, a, r, m, b, h, d)| SweepRow {
                swept_value: v,
                alpha_star: a,
                regime: Regime::ALL[r],
                r_max: m,
                r_bm: b,
                r_hm: h,
                alpha_dagger: d.map_or(HarvestThreshold::Unreachable, HarvestThreshold::Finite),
            })
    }

    proptest! {
        #[test]
        fn float_text_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(parse_f64(&fmt_f64(x)).unwrap().to_bits(), x.to_bits());
        }

        #[test]
        fn sweep_csv_round_trip(rows in prop::collection::vec(arb_row(), 0..20)) {
            let text = sweep_csv(&rows);
            let parsed = parse_sweep_csv(&text).unwrap();
            prop_assert_eq!(&parsed, &rows);
            prop_assert_eq!(sweep_csv(&parsed), text);
        }
    }
}
