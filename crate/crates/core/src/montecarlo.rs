//! Logical error rate estimation and pseudo-threshold extraction.
//!
//! Trials are independent: trial `i` draws everything from
//! `trial_rng(seed, i)`, so any partition of the index range gives the same
//! counts. The std crate runs chunks in parallel and adds [`Counts`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::bits::Bits;
use crate::code::{CssCode, StabilizerGroup};
use crate::frame::finalize_records;
use crate::ftec::{DecodeOutcome, Ftec, FtecError};
use crate::circuit::LocationKind;
use crate::noise::{trial_rng, uniform_theta, CcPhases, CcPolicy, Fault, FaultAssignment, FaultSampler, NoiseModel};
use crate::pauli::{Letter, Pauli};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub enum MonteCarloError {
    Ftec(FtecError),
    NoTrials,
    /// No adjacent pair of grid points straddles `p_L = p`.
    NoCrossing { curve: Vec<(f64, f64)> },
}

impl fmt::Display for MonteCarloError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ftec(e) => write!(f, "{e}"),
            Self::NoTrials => write!(f, "trials must be at least 1"),
            Self::NoCrossing { curve } => {
                write!(f, "no crossing of p_L = p in curve [")?;
                for (i, (p, pl)) in curve.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "({p:e}, {pl:e})")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl core::error::Error for MonteCarloError {}

impl From<FtecError> for MonteCarloError {
    fn from(e: FtecError) -> Self {
        Self::Ftec(e)
    }
}

/// How the output of one protocol run is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecoderKind {
    /// Noiseless syndrome plus a minimum-weight correction.
    #[default]
    MinWeight,
    /// Only residuals within weight `t` of the code space count as success.
    Bounded,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::MinWeight => "min_weight",
            Self::Bounded => "bounded",
        }
    }
}

/// Ideal decoder: one minimum-weight correction per reachable syndrome.
#[derive(Debug, Clone)]
pub struct MinWeightDecoder {
    code: CssCode,
    group: StabilizerGroup,
    corrections: BTreeMap<Bits, Pauli>,
}

impl MinWeightDecoder {
    pub fn new(code: &CssCode) -> Self {
        let n = code.n();
        let m = code.generators().len();
        let target = if m < 63 { 1u64 << m } else { u64::MAX };
        let mut corrections = BTreeMap::new();
        corrections.insert(Bits::zeros(m), Pauli::identity(n));
        let mut w = 1;
        while (corrections.len() as u64) < target && w <= n {
            let mut positions = Vec::with_capacity(w);
            add_weight(code, n, w, 0, &mut positions, &mut corrections);
            w += 1;
        }
        Self { code: code.clone(), group: code.stabilizer().group(), corrections }
    }

    pub fn correction_for(&self, syndrome: &Bits) -> Option<&Pauli> {
        self.corrections.get(syndrome)
    }

    pub fn len(&self) -> usize {
        self.corrections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corrections.is_empty()
    }

    pub fn decode(&self, residual: &Pauli) -> DecodeOutcome {
        let s = self.code.stabilizer().syndrome_unchecked(residual);
        match self.corrections.get(&s) {
            Some(c) if self.group.contains_up_to_phase(&residual.mul(c)) => DecodeOutcome::Success,
            _ => DecodeOutcome::LogicalFailure,
        }
    }
}

fn add_weight(
    code: &CssCode,
    n: usize,
    w: usize,
    start: usize,
    positions: &mut Vec<usize>,
    out: &mut BTreeMap<Bits, Pauli>,
) {
    if positions.len() == w {
        let combos = 3usize.pow(w as u32);
        for mut v in 0..combos {
            let mut p = Pauli::identity(n);
            for &q in positions.iter() {
                p.set(q, Letter::NON_IDENTITY[v % 3]);
                v /= 3;
            }
            out.entry(code.stabilizer().syndrome_unchecked(&p)).or_insert(p);
        }
        return;
    }
    for q in start..n {
        positions.push(q);
        add_weight(code, n, w, q + 1, positions, out);
        positions.pop();
    }
}

/// Per-run knobs beyond the noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOptions {
    pub decoder: DecoderKind,
    /// Draw a new phase for the second round under
    /// [`CcPolicy::RandomPerTrial`] instead of reusing the first one.
    pub fresh_theta_round2: bool,
    pub leftover: LeftoverRecords,
}

/// Treatment of coherent records still present when the protocol ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeftoverRecords {
    /// Collapse them as an ideal syndrome measurement would.
    #[default]
    Collapse,
    /// Discard them and judge the Pauli frame alone.
    Drop,
}

impl LeftoverRecords {
    pub fn name(self) -> &'static str {
        match self {
            Self::Collapse => "collapse",
            Self::Drop => "drop",
        }
    }
}

/// Failure counts over a contiguous block of trials. Adding two blocks gives
/// the counts of their union.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub trials: u64,
    pub failures: u64,
    pub second_rounds: u64,
    pub unknown_syndromes: u64,
}

impl core::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            trials: self.trials + o.trials,
            failures: self.failures + o.failures,
            second_rounds: self.second_rounds + o.second_rounds,
            unknown_syndromes: self.unknown_syndromes + o.unknown_syndromes,
        }
    }
}

/// Everything one worker needs; immutable and shared between threads.
#[derive(Debug, Clone)]
pub struct Experiment {
    ftec: Ftec,
    sampler: FaultSampler,
    min_weight: MinWeightDecoder,
    options: TrialOptions,
}

impl Experiment {
    pub fn new(ftec: Ftec, options: TrialOptions) -> Self {
        let sampler = FaultSampler::from_locations(ftec.simulator().locations(), ftec.simulator().cc_slots());
        let min_weight = MinWeightDecoder::new(ftec.code());
        Self { ftec, sampler, min_weight, options }
    }

    pub fn ftec(&self) -> &Ftec {
        &self.ftec
    }

    pub fn options(&self) -> TrialOptions {
        self.options
    }

    /// Runs trial `index` and reports whether it ended in a logical failure.
    pub fn trial(&self, model: &NoiseModel, index: u64) -> Result<TrialOutcome, FtecError> {
        let mut rng = trial_rng(model.seed, index);
        let theta = match model.cc {
            CcPolicy::RandomPerTrial => Some(uniform_theta(&mut rng)),
            _ => None,
        };
        let f1 = self.sampler.sample(model, &mut rng, theta);
        if f1.faults.is_empty() {
            // Without faults there are no records and every outcome is zero.
            return Ok(TrialOutcome { failure: false, second_round: false, unknown_syndrome: false });
        }
        let theta2 = if self.options.fresh_theta_round2 { None } else { theta };
        let f2 = self.sampler.sample(model, &mut rng, theta2);
        let mut trace = self.ftec.run(None, &f1, &f2, &mut rng)?;
        match self.options.leftover {
            LeftoverRecords::Collapse => finalize_records(&mut trace.state, &mut rng),
            LeftoverRecords::Drop => trace.state.records.clear(),
        }
        let residual = trace.state.data_error(self.ftec.code().n());
        let outcome = match self.options.decoder {
            DecoderKind::MinWeight => self.min_weight.decode(&residual),
            DecoderKind::Bounded => self.ftec.decoder().decode(&residual),
        };
        Ok(TrialOutcome {
            failure: outcome == DecodeOutcome::LogicalFailure,
            second_round: trace.rounds == 2,
            unknown_syndrome: trace.unknown_syndrome,
        })
    }

    pub fn run_range(&self, model: &NoiseModel, range: Range<u64>) -> Result<Counts, FtecError> {
        let mut c = Counts::default();
        for i in range {
            let t = self.trial(model, i)?;
            c.trials += 1;
            c.failures += t.failure as u64;
            c.second_rounds += t.second_round as u64;
            c.unknown_syndromes += t.unknown_syndrome as u64;
        }
        Ok(c)
    }
}

/// Slope of `p_L(p)` at `p = 0`: the sum over single faults of their rate
/// relative to `p` times their failure probability. Phases are drawn
/// uniformly, `samples` per fault, when `cc` is set. A value of at least 1
/// means the curve never drops below `p_L = p`.
pub fn first_order_coefficient(e: &Experiment, gamma: f64, cc: bool, samples: u64, seed: u64) -> Result<f64, FtecError> {
    let locs = e.ftec.simulator().locations();
    let n = e.ftec.code().n();
    let samples = if cc { samples.max(1) } else { 1 };
    let mut total = 0.0;
    for (li, loc) in locs.iter().enumerate() {
        let faults = Fault::all_for(loc.kind);
        let weight = match loc.kind {
            LocationKind::Idle => gamma / faults.len() as f64,
            LocationKind::Meas => 2.0 / 3.0,
            _ => 1.0 / faults.len() as f64,
        };
        if weight == 0.0 {
            continue;
        }
        for &fault in &faults {
            let mut fails = 0u64;
            for t in 0..samples {
                let mut rng = trial_rng(seed, t);
                let phases = if cc { CcPhases::Uniform(uniform_theta(&mut rng)) } else { CcPhases::Off };
                let f1 = FaultAssignment { faults: alloc::vec![(li as u32, fault)], cc: phases.clone() };
                let f2 = FaultAssignment { faults: Vec::new(), cc: phases };
                let mut trace = e.ftec.run(None, &f1, &f2, &mut rng)?;
                finalize_records(&mut trace.state, &mut rng);
                let residual = trace.state.data_error(n);
                let outcome = match e.options.decoder {
                    DecoderKind::MinWeight => e.min_weight.decode(&residual),
                    DecoderKind::Bounded => e.ftec.decoder().decode(&residual),
                };
                fails += (outcome == DecodeOutcome::LogicalFailure) as u64;
            }
            total += weight * fails as f64 / samples as f64;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub failure: bool,
    pub second_round: bool,
    pub unknown_syndrome: bool,
}

/// Fault assignment that trial `index` would use for its first round.
pub fn first_round_faults(e: &Experiment, model: &NoiseModel, index: u64) -> FaultAssignment {
    let mut rng = trial_rng(model.seed, index);
    let theta = match model.cc {
        CcPolicy::RandomPerTrial => Some(uniform_theta(&mut rng)),
        _ => None,
    };
    e.sampler.sample(model, &mut rng, theta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub p: f64,
    pub gamma: f64,
    pub cc_policy: CcPolicy,
    pub trials: u64,
    pub failures: u64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Seconds; filled in by callers that have a clock.
    pub wall_time: Option<f64>,
}

impl RunSummary {
    pub fn from_counts(model: &NoiseModel, counts: Counts) -> Self {
        let (lo, hi) = wilson_interval(counts.failures, counts.trials, Z95);
        Self {
            p: model.p,
            gamma: model.gamma,
            cc_policy: model.cc,
            trials: counts.trials,
            failures: counts.failures,
            p_l: counts.failures as f64 / counts.trials as f64,
            ci_low: lo,
            ci_high: hi,
            seed: model.seed,
            wall_time: None,
        }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)) / denom;
    // Clamp so the interval always holds the point estimate despite rounding.
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Single-threaded estimate over trials `0..trials`.
pub fn estimate_logical_rate(e: &Experiment, model: &NoiseModel, trials: u64) -> Result<RunSummary, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    let counts = e.run_range(model, 0..trials)?;
    Ok(RunSummary::from_counts(model, counts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoThreshold {
    pub p_star: f64,
    /// Crossing of the upper confidence curve; `None` if it does not cross
    /// inside the grid.
    pub low: Option<f64>,
    /// Crossing of the lower confidence curve.
    pub high: Option<f64>,
}

/// Crossing of `p_L(p) = p` by log-log interpolation between the first pair
/// of neighbouring grid points that moves from below to above the line.
pub fn pseudo_threshold(points: &[(f64, f64)]) -> Result<f64, MonteCarloError> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        let (p1, l1) = w[0];
        let (p2, l2) = w[1];
        if l1 < p1 && l2 >= p2 && l1 > 0.0 && p1 > 0.0 {
            let g1 = libm::log(l1 / p1);
            let g2 = libm::log(l2 / p2);
            let s = g1 / (g1 - g2);
            let x = libm::log(p1) + s * (libm::log(p2) - libm::log(p1));
            return Ok(libm::exp(x));
        }
    }
    Err(MonteCarloError::NoCrossing { curve: pts })
}

/// Crossing with a band from the Wilson bounds of each point.
pub fn pseudo_threshold_with_ci(runs: &[RunSummary]) -> Result<PseudoThreshold, MonteCarloError> {
    let curve = |f: fn(&RunSummary) -> f64| runs.iter().map(|r| (r.p, f(r))).collect::<Vec<_>>();
    let p_star = pseudo_threshold(&curve(|r| r.p_l))?;
    Ok(PseudoThreshold {
        p_star,
        low: pseudo_threshold(&curve(|r| r.ci_high)).ok(),
        high: pseudo_threshold(&curve(|r| r.ci_low)).ok(),
    })
}

/// `count` values per decade, log-spaced from `lo` up to at most `hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let step = 1.0 / per_decade as f64;
    let start = libm::log10(lo);
    let end = libm::log10(hi);
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let e = start + step * i as f64;
        if e > end + 1e-9 {
            break;
        }
        out.push(libm::pow(10.0, e));
        i += 1;
    }
    out
}

/// Short label for a curve, e.g. `gamma=0.01 cc=off`.
pub fn curve_label(gamma: f64, cc: CcPolicy) -> String {
    alloc::format!("gamma={gamma} cc={}", cc.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::builtin;
    use crate::extraction::build_shor_round;

    fn experiment(name: &str) -> Experiment {
        let code = builtin(name).unwrap();
        let round = build_shor_round(&code).unwrap();
        Experiment::new(Ftec::new(&code, &round).unwrap(), TrialOptions::default())
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
    }

    #[test]
    fn crossing_of_quadratic_curve_is_exact() {
        let pth = 9.28e-4;
        let pts: Vec<(f64, f64)> = log_grid(1e-4, 1e-2, 8).into_iter().map(|p| (p, p * p / pth)).collect();
        let got = pseudo_threshold(&pts).unwrap();
        assert!((got / pth - 1.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn curve_above_identity_has_no_crossing() {
        let pts = [(1e-4, 2e-4), (1e-3, 3e-3)];
        assert!(matches!(pseudo_threshold(&pts), Err(MonteCarloError::NoCrossing { .. })));
    }

    #[test]
    fn zero_noise_never_fails() {
        let e = experiment("c12");
        for cc in [CcPolicy::Off, CcPolicy::RandomPerTrial, CcPolicy::RandomPerLayer] {
            let m = NoiseModel::new(0.0, 1.0, cc, 11).unwrap();
            let s = estimate_logical_rate(&e, &m, 2000).unwrap();
            assert_eq!(s.failures, 0);
        }
    }

    #[test]
    fn min_weight_decoder_covers_every_syndrome() {
        for name in ["c4", "c12"] {
            let code = builtin(name).unwrap();
            let d = MinWeightDecoder::new(&code);
            assert_eq!(d.len(), 1 << code.generators().len());
        }
        let code = builtin("c12").unwrap();
        let d = MinWeightDecoder::new(&code);
        for q in 0..12 {
            for l in Letter::NON_IDENTITY {
                let p = Pauli::single(12, q, l);
                assert_eq!(d.decode(&p), DecodeOutcome::Success);
            }
        }
        let lz = crate::pauli::parse_pauli("IIIIIIZIZIIZ").unwrap();
        assert_eq!(d.decode(&lz), DecodeOutcome::LogicalFailure);
    }

    #[test]
    fn single_faults_are_harmless_without_cc() {
        let e = experiment("c12");
        assert_eq!(first_order_coefficient(&e, 1.0, false, 1, 0).unwrap(), 0.0);
    }

    #[test]
    fn determinism() {
        let e = experiment("c12");
        let m = NoiseModel::new(3e-3, 1.0, CcPolicy::RandomPerTrial, 5).unwrap();
        let a = e.run_range(&m, 0..3000).unwrap();
        let b = e.run_range(&m, 0..1000).unwrap() + e.run_range(&m, 1000..3000).unwrap();
        assert_eq!(a, b);
        assert!(a.failures > 0);
    }
}

