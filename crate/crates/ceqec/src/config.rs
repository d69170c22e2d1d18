//! Flat `key = value` experiment configuration.
//!
//! Lists are comma separated. `sim` runs every combination of `p`, `gamma`
//! and `cc_policy`; `threshold` runs one curve per `(gamma, cc_policy)` over
//! `p` (or a log grid from `p_min`, `p_max`, `per_decade`).

use std::collections::BTreeMap;

use ceqec_core::extraction::{Method, ShorSchedule};
use ceqec_core::frame::Calibration;
use ceqec_core::montecarlo::{log_grid, DecoderKind, LeftoverRecords, TrialOptions};
use ceqec_core::noise::{CcPolicy, NoiseModel};

use crate::error::{Error, ParseError, Result};
use crate::text::strip_comment;

pub const KEYS: [&str; 20] = [
    "code",
    "method",
    "schedule",
    "p",
    "p_min",
    "p_max",
    "per_decade",
    "gamma",
    "cc_policy",
    "theta",
    "seed",
    "trials",
    "max_trials",
    "decoder",
    "leftover",
    "fresh_theta_round2",
    "calibration",
    "jobs",
    "chunk",
    "plot_data",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcKind {
    Off,
    Fixed,
    RandomPerTrial,
    RandomPerLayer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub code: String,
    pub method: Method,
    pub schedule: ShorSchedule,
    pub p: Vec<f64>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub per_decade: usize,
    pub gamma: Vec<f64>,
    pub cc_policy: Vec<CcKind>,
    pub theta: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    /// Points whose interval straddles `p_L = p` get more trials, doubling
    /// up to this total.
    pub max_trials: Option<u64>,
    pub options: TrialOptions,
    pub calibration: Calibration,
    pub jobs: Option<usize>,
    pub chunk: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            code: "c12".into(),
            method: Method::Shor,
            schedule: ShorSchedule::Sequential,
            p: Vec::new(),
            p_min: None,
            p_max: None,
            per_decade: 8,
            gamma: vec![1.0],
            cc_policy: vec![CcKind::Off],
            theta: None,
            seed: 0,
            trials: 100_000,
            max_trials: None,
            options: TrialOptions::default(),
            calibration: Calibration::DERIVED,
            jobs: None,
            chunk: 4096,
        }
    }
}

fn list<T>(v: &str, f: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    v.split(',').map(|s| f(s.trim())).collect()
}

fn float(s: &str) -> Option<f64> {
    s.parse().ok().filter(|x: &f64| x.is_finite())
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut c = Self::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = strip_comment(raw);
            if body.trim().is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| ParseError::new(line, 1, "expected `key = value`"))?;
            let col = body.len() - body.trim_start().len() + 1;
            let key = k.trim();
            if seen.insert(key.to_string(), line).is_some() {
                return Err(ParseError::new(line, col, format!("key `{key}` given twice")));
            }
            let vcol = k.chars().count() + 2 + (v.len() - v.trim_start().len());
            c.set(key, v.trim()).map_err(|m| {
                let column = if m.starts_with("unknown key") { col } else { vcol };
                ParseError::new(line, column, m)
            })?;
        }
        Ok(c)
    }

    /// Sets one key; the message names the key on failure.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let bad = || format!("invalid value `{value}` for `{key}`");
        match key {
            "code" => self.code = value.to_string(),
            "method" => {
                self.method = match value {
                    "shor" => Method::Shor,
                    "steane" => Method::Steane,
                    _ => return Err(bad()),
                }
            }
            "schedule" => {
                self.schedule = match value {
                    "sequential" => ShorSchedule::Sequential,
                    "packed" => ShorSchedule::Packed,
                    _ => return Err(bad()),
                }
            }
            "p" => self.p = list(value, float).ok_or_else(bad)?,
            "p_min" => self.p_min = Some(float(value).ok_or_else(bad)?),
            "p_max" => self.p_max = Some(float(value).ok_or_else(bad)?),
            "per_decade" => self.per_decade = value.parse().ok().filter(|&x| x > 0).ok_or_else(bad)?,
            "gamma" => self.gamma = list(value, float).ok_or_else(bad)?,
            "cc_policy" => {
                self.cc_policy = list(value, |s| match s {
                    "off" => Some(CcKind::Off),
                    "fixed" => Some(CcKind::Fixed),
                    "random_per_trial" => Some(CcKind::RandomPerTrial),
                    "random_per_layer" => Some(CcKind::RandomPerLayer),
                    _ => None,
                })
                .ok_or_else(bad)?
            }
            "theta" => self.theta = Some(float(value).ok_or_else(bad)?),
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "trials" => self.trials = value.parse().ok().filter(|&x| x > 0).ok_or_else(bad)?,
            "max_trials" => self.max_trials = Some(value.parse().map_err(|_| bad())?),
            "decoder" => {
                self.options.decoder = match value {
                    "min_weight" => DecoderKind::MinWeight,
                    "bounded" => DecoderKind::Bounded,
                    _ => return Err(bad()),
                }
            }
            "leftover" => {
                self.options.leftover = match value {
                    "collapse" => LeftoverRecords::Collapse,
                    "drop" => LeftoverRecords::Drop,
                    _ => return Err(bad()),
                }
            }
            "fresh_theta_round2" => self.options.fresh_theta_round2 = value.parse().map_err(|_| bad())?,
            "calibration" => {
                self.calibration = match value {
                    "derived" => Calibration::DERIVED,
                    "literal" => Calibration::LITERAL,
                    _ => return Err(bad()),
                }
            }
            "jobs" => self.jobs = Some(value.parse().ok().filter(|&x| x > 0).ok_or_else(bad)?),
            "chunk" => self.chunk = value.parse().ok().filter(|&x| x > 0).ok_or_else(bad)?,
            // accepted for manifests; the command line decides where files go
            "plot_data" => {}
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Applies `key=value` overrides from the command line.
    pub fn apply_overrides<'a>(&mut self, items: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for item in items {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Usage(format!("expected KEY=VALUE, found `{item}`")))?;
            self.set(k.trim(), v.trim()).map_err(Error::Usage)?;
        }
        Ok(())
    }

    pub fn cc_policies(&self) -> Result<Vec<CcPolicy>> {
        self.cc_policy
            .iter()
            .map(|k| {
                Ok(match k {
                    CcKind::Off => CcPolicy::Off,
                    CcKind::Fixed => CcPolicy::Fixed(
                        self.theta.ok_or_else(|| Error::Config("cc_policy = fixed needs `theta`".into()))?,
                    ),
                    CcKind::RandomPerTrial => CcPolicy::RandomPerTrial,
                    CcKind::RandomPerLayer => CcPolicy::RandomPerLayer,
                })
            })
            .collect()
    }

    /// Explicit `p` values, else the log grid.
    pub fn p_values(&self) -> Result<Vec<f64>> {
        if !self.p.is_empty() {
            return Ok(self.p.clone());
        }
        match (self.p_min, self.p_max) {
            (Some(lo), Some(hi)) if lo > 0.0 && hi >= lo => Ok(log_grid(lo, hi, self.per_decade)),
            (Some(_), Some(_)) => Err(Error::Config("need 0 < p_min <= p_max".into())),
            _ => Err(Error::Config("set `p`, or both `p_min` and `p_max`".into())),
        }
    }

    pub fn model(&self, p: f64, gamma: f64, cc: CcPolicy) -> Result<NoiseModel> {
        Ok(NoiseModel::new(p, gamma, cc, self.seed)?)
    }

    /// How the phase is drawn, as written to the `theta_policy` CSV column.
    pub fn theta_policy(&self, cc: CcPolicy) -> String {
        match cc {
            CcPolicy::Off => "none".into(),
            CcPolicy::Fixed(t) => format!("fixed:{t}"),
            CcPolicy::RandomPerTrial if self.options.fresh_theta_round2 => "uniform_per_round".into(),
            CcPolicy::RandomPerTrial => "uniform_per_trial".into(),
            CcPolicy::RandomPerLayer => "uniform_per_layer".into(),
        }
    }
}
