//! Parallel Monte Carlo over trial-index chunks.
//!
//! Each trial draws from its own `(seed, trial_index)` stream and the counts
//! of disjoint chunks add, so results do not depend on the worker count.

use std::fmt::Write as _;
use std::ops::Range;
use std::time::Instant;

use ceqec_core::code::CssCode;
use ceqec_core::extraction::{build_shor_round_with, build_steane_round, ExtractionRound, Method, ShorSchedule};
use ceqec_core::ftec::{build_lookup_table, Ftec};
use ceqec_core::montecarlo::{
    curve_label, pseudo_threshold_with_ci, Counts, Experiment, MonteCarloError, PseudoThreshold, RunSummary,
};
use ceqec_core::noise::{CcPolicy, NoiseModel};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::codes::resolve_css;
use crate::config::Config;
use crate::error::Result;

pub const CSV_HEADER: &str = "p,gamma,cc_policy,theta_policy,trials,failures,p_L,ci_low,ci_high,seed";

pub struct Runner {
    pool: ThreadPool,
    chunk: u64,
}

impl Runner {
    /// `jobs = None` uses the available parallelism.
    pub fn new(jobs: Option<usize>, chunk: u64) -> Result<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            b = b.num_threads(j);
        }
        Ok(Self { pool: b.build()?, chunk: chunk.max(1) })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn counts(&self, e: &Experiment, model: &NoiseModel, range: Range<u64>) -> Result<Counts> {
        let chunk = self.chunk;
        let starts: Vec<u64> = (range.start..range.end).step_by(chunk as usize).collect();
        let c = self.pool.install(|| {
            starts
                .into_par_iter()
                .map(|s| e.run_range(model, s..(s + chunk).min(range.end)))
                .try_reduce(Counts::default, |a, b| Ok(a + b))
        })?;
        Ok(c)
    }

    /// Runs `trials` trials, then keeps doubling up to `max_trials` while the
    /// Wilson interval still contains `p`.
    pub fn estimate(&self, e: &Experiment, model: &NoiseModel, trials: u64, max_trials: Option<u64>) -> Result<RunSummary> {
        if trials == 0 {
            return Err(MonteCarloError::NoTrials.into());
        }
        let start = Instant::now();
        let mut counts = self.counts(e, model, 0..trials)?;
        let cap = max_trials.unwrap_or(trials);
        loop {
            let s = RunSummary::from_counts(model, counts);
            let straddles = s.ci_low <= model.p && model.p <= s.ci_high;
            if !straddles || counts.trials >= cap {
                break;
            }
            let next = (counts.trials * 2).min(cap);
            counts = counts + self.counts(e, model, counts.trials..next)?;
        }
        let mut s = RunSummary::from_counts(model, counts);
        s.wall_time = Some(start.elapsed().as_secs_f64());
        Ok(s)
    }
}

pub fn round_for(code: &CssCode, method: Method, schedule: ShorSchedule) -> Result<ExtractionRound> {
    Ok(match method {
        Method::Shor => build_shor_round_with(code, schedule)?,
        Method::Steane => build_steane_round(code)?,
    })
}

pub fn build_experiment(cfg: &Config) -> Result<Experiment> {
    let code = resolve_css(&cfg.code)?;
    let round = round_for(&code, cfg.method, cfg.schedule)?;
    let table = build_lookup_table(&code, &round)?;
    let ftec = Ftec::with_options(&code, &round, table, cfg.calibration)?;
    Ok(Experiment::new(ftec, cfg.options))
}

pub fn csv_row(s: &RunSummary, theta_policy: &str) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        s.p,
        s.gamma,
        s.cc_policy.name(),
        theta_policy,
        s.trials,
        s.failures,
        s.p_l,
        s.ci_low,
        s.ci_high,
        s.seed
    )
}

pub fn csv(rows: &[(RunSummary, String)]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (s, tp) in rows {
        out.push_str(&csv_row(s, tp));
        out.push('\n');
    }
    out
}

/// Every `(p, gamma, cc_policy)` combination of the configuration.
pub fn run_sim(
    cfg: &Config,
    runner: &Runner,
    mut progress: impl FnMut(&RunSummary),
) -> Result<Vec<(RunSummary, String)>> {
    let e = build_experiment(cfg)?;
    let mut rows = Vec::new();
    for cc in cfg.cc_policies()? {
        for &gamma in &cfg.gamma {
            for p in cfg.p_values()? {
                let s = runner.estimate(&e, &cfg.model(p, gamma, cc)?, cfg.trials, cfg.max_trials)?;
                progress(&s);
                rows.push((s, cfg.theta_policy(cc)));
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub gamma: f64,
    pub cc: CcPolicy,
    pub theta_policy: String,
    pub runs: Vec<RunSummary>,
    pub threshold: std::result::Result<PseudoThreshold, MonteCarloError>,
}

impl Curve {
    pub fn label(&self) -> String {
        curve_label(self.gamma, self.cc)
    }

    /// File-name friendly label.
    pub fn slug(&self) -> String {
        format!("gamma{}_{}", self.gamma, self.cc.name())
    }

    /// Two columns `p p_L` for plotting.
    pub fn plot_data(&self) -> String {
        let mut s = format!("# {}\n", self.label());
        for r in &self.runs {
            let _ = writeln!(s, "{} {}", r.p, r.p_l);
        }
        s
    }

    pub fn summary(&self) -> String {
        match &self.threshold {
            Ok(t) => {
                let b = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.4e}"));
                format!("{}: p* = {:.4e} (band {} .. {})", self.label(), t.p_star, b(t.low), b(t.high))
            }
            Err(MonteCarloError::NoCrossing { curve }) => {
                let ratio = |(p, l): &(f64, f64)| l / p;
                let lo = curve.iter().map(ratio).fold(f64::INFINITY, f64::min);
                let hi = curve.iter().map(ratio).fold(0.0, f64::max);
                format!("{}: no crossing of p_L = p on the grid (p_L/p between {lo:.3} and {hi:.3})", self.label())
            }
            Err(e) => format!("{}: {e}", self.label()),
        }
    }
}

/// One curve per `(gamma, cc_policy)` with its pseudo-threshold.
pub fn run_threshold(cfg: &Config, runner: &Runner, mut progress: impl FnMut(&RunSummary)) -> Result<Vec<Curve>> {
    let e = build_experiment(cfg)?;
    let grid = cfg.p_values()?;
    let mut curves = Vec::new();
    for cc in cfg.cc_policies()? {
        for &gamma in &cfg.gamma {
            let mut runs = Vec::new();
            for &p in &grid {
                let s = runner.estimate(&e, &cfg.model(p, gamma, cc)?, cfg.trials, cfg.max_trials)?;
                progress(&s);
                runs.push(s);
            }
            let threshold = pseudo_threshold_with_ci(&runs);
            curves.push(Curve { gamma, cc, theta_policy: cfg.theta_policy(cc), runs, threshold });
        }
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4_config() -> Config {
        Config::parse("code = c4\np = 0.01\ngamma = 1\ncc_policy = random_per_trial\nseed = 3\ntrials = 3000\nchunk = 100\n")
            .unwrap()
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let cfg = c4_config();
        let e = build_experiment(&cfg).unwrap();
        let m = cfg.model(0.01, 1.0, CcPolicy::RandomPerTrial).unwrap();
        let one = Runner::new(Some(1), 97).unwrap().counts(&e, &m, 0..3000).unwrap();
        let many = Runner::new(Some(3), 250).unwrap().counts(&e, &m, 0..3000).unwrap();
        assert_eq!(one, many);
        assert_eq!(one, e.run_range(&m, 0..3000).unwrap());
    }

    #[test]
    fn adaptive_trials_stay_within_cap() {
        let cfg = c4_config();
        let e = build_experiment(&cfg).unwrap();
        let m = cfg.model(0.05, 1.0, CcPolicy::Off).unwrap();
        let r = Runner::new(Some(2), 100).unwrap();
        let s = r.estimate(&e, &m, 200, Some(1000)).unwrap();
        assert!(s.trials >= 200 && s.trials <= 1000);
        assert!(s.wall_time.is_some());
        assert!(r.estimate(&e, &m, 0, None).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = c4_config();
        let r = Runner::new(Some(2), 128).unwrap();
        let a = csv(&run_sim(&cfg, &r, |_| {}).unwrap());
        let b = csv(&run_sim(&cfg, &Runner::new(Some(1), 1000).unwrap(), |_| {}).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert!(a.contains(",random_per_trial,uniform_per_trial,3000,"));
    }
}
