//! Loading and validating experiment configurations.
//!
//! The format is TOML; see `docs/config-format.md` for the grammar. Every
//! schema error carries the line it refers to.

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use sensefuse_core::model::validate_scenario;
use sensefuse_core::{PolicyConstraints, SensingScenario};

use crate::CliError;

/// The canonical eight-band, two-radio instance.
pub const TABLE1_CFG: &str = include_str!("../table1.cfg");

/// Run options; command-line flags take precedence.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub epsilon: f64,
    pub epsilon_range: Option<EpsilonRange>,
    pub trials: usize,
    pub seed: u64,
    pub paper_compat: bool,
}

/// `steps` equally spaced budgets from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl EpsilonRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

impl std::str::FromStr for EpsilonRange {
    type Err = String;

    /// Parses `lo:hi:steps`.
    fn from_str(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, steps] = parts[..] else {
            return Err(format!("expected lo:hi:steps, got '{text}'"));
        };
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad lower bound '{lo}'"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad upper bound '{hi}'"))?;
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| format!("bad step count '{steps}'"))?;
        let r = EpsilonRange { lo, hi, steps };
        r.check()?;
        Ok(r)
    }
}

impl EpsilonRange {
    fn check(&self) -> Result<(), String> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0) {
            return Err("budgets must be positive and finite".into());
        }
        if self.steps == 0 {
            return Err("step count must be at least 1".into());
        }
        if self.steps > 1 && self.hi <= self.lo {
            return Err("upper bound must exceed lower bound".into());
        }
        Ok(())
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario: SensingScenario,
    pub policy: PolicyConstraints,
    pub run: RunOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Spanned<RawScenario>,
    policy: Spanned<RawPolicy>,
    #[serde(default)]
    run: Option<RawRun>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    num_bands: Spanned<i64>,
    num_radios: Spanned<i64>,
    samples_per_band: Spanned<i64>,
    noise_variance: Spanned<f64>,
    /// One row per radio, one entry per band.
    channel_gains: Spanned<Vec<Spanned<Vec<f64>>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PerBand {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    miss_caps: Spanned<PerBand>,
    false_alarm_caps: Spanned<PerBand>,
    interference_costs: Spanned<PerBand>,
    throughput_rates: Spanned<PerBand>,
    interference_budget: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    epsilon: Option<Spanned<f64>>,
    epsilon_range: Option<Spanned<String>>,
    trials: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    paper_compat: Option<bool>,
}

/// Maps byte offsets to 1-based line numbers.
struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn at(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }

    fn error(&self, span: Range<usize>, message: impl std::fmt::Display) -> String {
        format!("line {}: {message}", self.at(span.start))
    }
}

fn count(lines: &Lines<'_>, v: &Spanned<i64>, name: &str, errors: &mut Vec<String>) -> usize {
    match usize::try_from(*v.get_ref()) {
        Ok(n) if n >= 1 => n,
        _ => {
            errors.push(lines.error(
                v.span(),
                format!("{name} must be a positive integer, got {}", v.get_ref()),
            ));
            0
        }
    }
}

fn per_band(v: &Spanned<PerBand>, k: usize) -> Vec<f64> {
    match v.get_ref() {
        PerBand::Scalar(x) => vec![*x; k],
        PerBand::List(xs) => xs.clone(),
    }
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let lines = Lines(text);
    if text.trim().is_empty() {
        return Err(CliError::Config(vec!["configuration is empty".into()]));
    }
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        CliError::Config(vec![match e.span() {
            Some(span) => lines.error(span, msg),
            None => msg,
        }])
    })?;

    let mut errors = Vec::new();
    let sc = raw.scenario.get_ref();
    let k = count(&lines, &sc.num_bands, "num_bands", &mut errors);
    let n = count(&lines, &sc.num_radios, "num_radios", &mut errors);
    let m = count(
        &lines,
        &sc.samples_per_band,
        "samples_per_band",
        &mut errors,
    );

    let rows = sc.channel_gains.get_ref();
    if rows.len() != n {
        errors.push(lines.error(
            sc.channel_gains.span(),
            format!(
                "channel_gains: expected {n} rows (one per radio), got {}",
                rows.len()
            ),
        ));
    }
    for (radio, row) in rows.iter().enumerate() {
        if row.get_ref().len() != k {
            errors.push(lines.error(
                row.span(),
                format!(
                    "channel_gains: radio {radio} has {} entries, expected {k}",
                    row.get_ref().len()
                ),
            ));
        }
    }
    let channel_gains: Vec<Vec<f64>> = if errors.is_empty() {
        (0..k)
            .map(|band| rows.iter().map(|r| r.get_ref()[band]).collect())
            .collect()
    } else {
        Vec::new()
    };

    let pol = raw.policy.get_ref();
    let scenario = SensingScenario {
        num_bands: k,
        num_radios: n,
        samples_per_band: m,
        noise_variance: *sc.noise_variance.get_ref(),
        channel_gains,
    };
    let policy = PolicyConstraints {
        miss_caps: per_band(&pol.miss_caps, k),
        false_alarm_caps: per_band(&pol.false_alarm_caps, k),
        interference_costs: per_band(&pol.interference_costs, k),
        throughput_rates: per_band(&pol.throughput_rates, k),
        interference_budget: *pol.interference_budget.get_ref(),
    };

    if errors.is_empty() {
        if let Err(violations) = validate_scenario(&scenario, &policy) {
            for v in violations {
                let span = match v.field {
                    "num_bands" => sc.num_bands.span(),
                    "num_radios" => sc.num_radios.span(),
                    "samples_per_band" => sc.samples_per_band.span(),
                    "noise_variance" => sc.noise_variance.span(),
                    "channel_gains" => sc.channel_gains.span(),
                    "miss_caps" => pol.miss_caps.span(),
                    "false_alarm_caps" => pol.false_alarm_caps.span(),
                    "interference_costs" => pol.interference_costs.span(),
                    "throughput_rates" => pol.throughput_rates.span(),
                    "interference_budget" => pol.interference_budget.span(),
                    _ => raw.scenario.span(),
                };
                errors.push(lines.error(span, v));
            }
        }
    }

    let mut run = RunOptions {
        epsilon: policy.interference_budget,
        epsilon_range: None,
        trials: 100_000,
        seed: 1,
        paper_compat: false,
    };
    if let Some(r) = &raw.run {
        if let Some(e) = &r.epsilon {
            if *e.get_ref() > 0.0 && e.get_ref().is_finite() {
                run.epsilon = *e.get_ref();
            } else {
                errors.push(lines.error(e.span(), "run.epsilon must be positive"));
            }
        }
        if let Some(range) = &r.epsilon_range {
            match range.get_ref().parse::<EpsilonRange>() {
                Ok(v) => run.epsilon_range = Some(v),
                Err(msg) => {
                    errors.push(lines.error(range.span(), format!("run.epsilon_range: {msg}")))
                }
            }
        }
        if let Some(t) = &r.trials {
            match usize::try_from(*t.get_ref()) {
                Ok(v) if v >= 1 => run.trials = v,
                _ => errors.push(lines.error(t.span(), "run.trials must be a positive integer")),
            }
        }
        if let Some(sd) = &r.seed {
            match u64::try_from(*sd.get_ref()) {
                Ok(v) => run.seed = v,
                Err(_) => {
                    errors.push(lines.error(sd.span(), "run.seed must be a non-negative integer"))
                }
            }
        }
        if let Some(pc) = r.paper_compat {
            run.paper_compat = pc;
        }
    }

    if errors.is_empty() {
        Ok(Config {
            scenario,
            policy,
            run,
        })
    } else {
        Err(CliError::Config(errors))
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(list) => CliError::Config(
            list.into_iter()
                .map(|m| format!("{}: {m}", path.display()))
                .collect(),
        ),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_is_the_table1_instance() {
        let c = parse_config(TABLE1_CFG).unwrap();
        assert_eq!(c.scenario, SensingScenario::table1());
        assert_eq!(
            c.policy,
            PolicyConstraints::table1(c.policy.interference_budget)
        );
        assert_eq!(
            c.run.epsilon_range,
            Some(EpsilonRange {
                lo: 0.5,
                hi: 6.0,
                steps: 12
            })
        );
    }

    #[test]
    fn range_values_are_evenly_spaced() {
        let r: EpsilonRange = "0.5:6.0:12".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 12);
        assert_eq!(v[0], 0.5);
        assert_eq!(v[11], 6.0);
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert_eq!("2:2:1".parse::<EpsilonRange>().unwrap().values(), vec![2.0]);
        for bad in ["1:2", "0:1:3", "2:1:3", "1:2:0", "a:b:c"] {
            assert!(bad.parse::<EpsilonRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn short_rate_vector_names_field_and_line() {
        let text = TABLE1_CFG.replace(
            "throughput_rates = [356, 327, 972, 806, 755, 68, 720, 15]",
            "throughput_rates = [356, 327, 972, 806, 755, 68, 720]",
        );
        assert_ne!(text, TABLE1_CFG);
        let CliError::Config(errs) = parse_config(&text).unwrap_err() else {
            panic!("expected a config error")
        };
        assert_eq!(errs.len(), 1);
        assert!(
            errs[0].contains("throughput_rates") && errs[0].contains("expected 8 entries, got 7"),
            "{errs:?}"
        );
        let line = TABLE1_CFG
            .lines()
            .position(|l| l.starts_with("throughput_rates"))
            .unwrap()
            + 1;
        assert!(errs[0].starts_with(&format!("line {line}:")), "{errs:?}");
    }

    #[test]
    fn empty_and_malformed_files_are_config_errors() {
        assert!(matches!(parse_config(""), Err(CliError::Config(_))));
        assert!(matches!(
            parse_config("[scenario]\nnum_bands = "),
            Err(CliError::Config(_))
        ));
        let CliError::Config(errs) = parse_config("[scenario]\nnum_bands = 1\n").unwrap_err()
        else {
            panic!()
        };
        assert!(errs[0].contains("missing field"), "{errs:?}");
    }

    #[test]
    fn cap_outside_half_interval_is_rejected() {
        let text = TABLE1_CFG.replace("miss_caps = 0.1", "miss_caps = 0.7");
        let CliError::Config(errs) = parse_config(&text).unwrap_err() else {
            panic!()
        };
        assert_eq!(errs.len(), 8);
        assert!(errs.iter().all(|e| e.contains("miss_caps")));
    }

    #[test]
    fn ragged_gain_rows_are_reported() {
        let text = TABLE1_CFG.replace(
            "0.21, 0.17, 0.21, 0.21, 0.17, 0.43, 0.15, 0.35",
            "0.21, 0.17",
        );
        let CliError::Config(errs) = parse_config(&text).unwrap_err() else {
            panic!()
        };
        assert!(errs[0].contains("radio 1 has 2 entries"), "{errs:?}");
    }
}
