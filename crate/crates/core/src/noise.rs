//! Circuit-level stochastic Pauli noise and collective-coherent phase policies.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{enumerate_locations, LayeredCircuit, Location, LocationKind};
use crate::pauli::Letter;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CcPolicy {
    Off,
    Fixed(f64),
    /// One phase per trial, shared by every slot.
    RandomPerTrial,
    /// A fresh phase for every slot.
    RandomPerLayer,
}

impl CcPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Off => "off",
            Self::Fixed(_) => "fixed",
            Self::RandomPerTrial => "random_per_trial",
            Self::RandomPerLayer => "random_per_layer",
        }
    }

    pub fn is_off(&self) -> bool {
        matches!(self, Self::Off)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseError {
    Probability(f64),
    Gamma(f64),
    Theta(f64),
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Probability(p) => write!(f, "p = {p} is outside [0, 1]"),
            Self::Gamma(g) => write!(f, "gamma = {g} is negative or not finite"),
            Self::Theta(t) => write!(f, "theta = {t} is outside [0, 2π)"),
        }
    }
}

impl core::error::Error for NoiseError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p: f64,
    pub gamma: f64,
    pub cc: CcPolicy,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(p: f64, gamma: f64, cc: CcPolicy, seed: u64) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(NoiseError::Probability(p));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(NoiseError::Gamma(gamma));
        }
        if let CcPolicy::Fixed(t) = cc {
            if !(0.0..TAU).contains(&t) {
                return Err(NoiseError::Theta(t));
            }
        }
        if gamma * p > 1.0 {
            return Err(NoiseError::Gamma(gamma));
        }
        Ok(Self { p, gamma, cc, seed })
    }

    /// Probability that a location of this kind carries any fault.
    pub fn rate(&self, kind: LocationKind) -> f64 {
        match kind {
            LocationKind::Prep | LocationKind::Gate1 | LocationKind::Gate2 => self.p,
            LocationKind::Idle => self.gamma * self.p,
            LocationKind::Meas => 2.0 * self.p / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    Pauli1(Letter),
    /// Letters on (first, second) qubit of the gate; never both identity.
    Pauli2(Letter, Letter),
    MeasFlip,
}

const LETTERS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

impl Fault {
    /// Every nontrivial fault value for a location kind, in a fixed order.
    pub fn all_for(kind: LocationKind) -> Vec<Fault> {
        match kind {
            LocationKind::Meas => alloc::vec![Fault::MeasFlip],
            LocationKind::Gate2 => (1..16).map(|v| Fault::Pauli2(LETTERS[v / 4], LETTERS[v % 4])).collect(),
            _ => Letter::NON_IDENTITY.iter().map(|&l| Fault::Pauli1(l)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CcPhases {
    Off,
    Uniform(f64),
    PerSlot(Vec<f64>),
}

impl CcPhases {
    #[inline]
    pub fn theta(&self, slot: usize) -> Option<f64> {
        match self {
            Self::Off => None,
            Self::Uniform(t) => Some(*t),
            Self::PerSlot(v) => v.get(slot).copied(),
        }
    }

    /// Draws phases for `slots` slots. `trial_theta` is used for
    /// [`CcPolicy::RandomPerTrial`] when given, otherwise one is drawn.
    pub fn sample<R: Rng>(policy: CcPolicy, slots: usize, rng: &mut R, trial_theta: Option<f64>) -> Self {
        match policy {
            CcPolicy::Off => Self::Off,
            CcPolicy::Fixed(t) => Self::Uniform(t),
            CcPolicy::RandomPerTrial => Self::Uniform(trial_theta.unwrap_or_else(|| uniform_theta(rng))),
            CcPolicy::RandomPerLayer => Self::PerSlot((0..slots).map(|_| uniform_theta(rng)).collect()),
        }
    }
}

pub fn uniform_theta<R: Rng>(rng: &mut R) -> f64 {
    rng.gen::<f64>() * TAU
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultAssignment {
    /// Sorted by location index.
    pub faults: Vec<(u32, Fault)>,
    pub cc: CcPhases,
}

impl FaultAssignment {
    pub fn none() -> Self {
        Self { faults: Vec::new(), cc: CcPhases::Off }
    }

    pub fn single(location: usize, fault: Fault) -> Self {
        Self { faults: alloc::vec![(location as u32, fault)], cc: CcPhases::Off }
    }

    pub fn is_fault_free(&self) -> bool {
        self.faults.is_empty()
    }
}

/// Per-trial generator: the stream index is the trial index, so any trial
/// can be regenerated on its own.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Location table of one circuit, grouped by fault class for fast sampling.
#[derive(Debug, Clone)]
pub struct FaultSampler {
    locations: Vec<Location>,
    single: Vec<u32>,
    idle: Vec<u32>,
    double: Vec<u32>,
    meas: Vec<u32>,
    cc_slots: usize,
}

impl FaultSampler {
    pub fn new(c: &LayeredCircuit) -> Self {
        Self::from_locations(&enumerate_locations(c), c.cc_slot_count())
    }

    pub fn from_locations(locations: &[Location], cc_slots: usize) -> Self {
        let locations = locations.to_vec();
        let mut s = Self {
            locations: Vec::new(),
            single: Vec::new(),
            idle: Vec::new(),
            double: Vec::new(),
            meas: Vec::new(),
            cc_slots,
        };
        for (i, l) in locations.iter().enumerate() {
            let bucket = match l.kind {
                LocationKind::Prep | LocationKind::Gate1 => &mut s.single,
                LocationKind::Idle => &mut s.idle,
                LocationKind::Gate2 => &mut s.double,
                LocationKind::Meas => &mut s.meas,
            };
            bucket.push(i as u32);
        }
        s.locations = locations;
        s
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn cc_slots(&self) -> usize {
        self.cc_slots
    }

    /// Stochastic Pauli faults only, sorted by location.
    pub fn sample_paulis<R: Rng>(&self, m: &NoiseModel, rng: &mut R) -> Vec<(u32, Fault)> {
        let mut out = Vec::new();
        let p = m.p;
        for_each_hit(&self.single, p, rng, |loc, rng| {
            out.push((loc, Fault::Pauli1(Letter::NON_IDENTITY[rng.gen_range(0..3)])));
        });
        for_each_hit(&self.idle, m.gamma * p, rng, |loc, rng| {
            out.push((loc, Fault::Pauli1(Letter::NON_IDENTITY[rng.gen_range(0..3)])));
        });
        for_each_hit(&self.double, p, rng, |loc, rng| {
            let v = rng.gen_range(1..16usize);
            out.push((loc, Fault::Pauli2(LETTERS[v / 4], LETTERS[v % 4])));
        });
        for_each_hit(&self.meas, 2.0 * p / 3.0, rng, |loc, _| out.push((loc, Fault::MeasFlip)));
        out.sort_unstable_by_key(|&(l, _)| l);
        out
    }

    pub fn sample<R: Rng>(&self, m: &NoiseModel, rng: &mut R, trial_theta: Option<f64>) -> FaultAssignment {
        let cc = CcPhases::sample(m.cc, self.cc_slots, rng, trial_theta);
        let faults = self.sample_paulis(m, rng);
        FaultAssignment { faults, cc }
    }
}

/// Visits each index independently with probability `q` by geometric skipping.
fn for_each_hit<R: Rng>(indices: &[u32], q: f64, rng: &mut R, mut f: impl FnMut(u32, &mut R)) {
    if q <= 0.0 || indices.is_empty() {
        return;
    }
    if q >= 1.0 {
        for &i in indices {
            f(i, rng);
        }
        return;
    }
    let log_miss = libm::log1p(-q);
    let mut pos: usize = 0;
    loop {
        let u = 1.0 - rng.gen::<f64>();
        let skip = libm::floor(libm::log(u) / log_miss);
        if skip >= (indices.len() - pos) as f64 {
            return;
        }
        pos += skip as usize;
        f(indices[pos], rng);
        pos += 1;
        if pos >= indices.len() {
            return;
        }
    }
}

/// Faults for one run of `c`, determined by `(m.seed, trial_index)`.
pub fn sample_faults(c: &LayeredCircuit, m: &NoiseModel, trial_index: u64) -> FaultAssignment {
    let sampler = FaultSampler::new(c);
    let mut rng = trial_rng(m.seed, trial_index);
    sampler.sample(m, &mut rng, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, GateKind, Layer};
    use alloc::vec;

    fn one_gate_circuit(kind: GateKind, qubits: Vec<usize>, n: usize) -> LayeredCircuit {
        let mut c = LayeredCircuit::with_counts(n, 0);
        c.push_layer(Layer::new(vec![Gate::new(kind, qubits)]));
        c
    }

    #[test]
    fn zero_noise_still_samples_phases() {
        let c = crate::circuit::insert_cc_layers(&one_gate_circuit(GateKind::CX, vec![0, 1], 3));
        let m = NoiseModel::new(0.0, 1.0, CcPolicy::RandomPerLayer, 7).unwrap();
        let f = sample_faults(&c, &m, 3);
        assert!(f.faults.is_empty());
        match f.cc {
            CcPhases::PerSlot(v) => assert_eq!(v.len(), 1),
            other => panic!("{other:?}"),
        }
        let m = NoiseModel::new(0.0, 1.0, CcPolicy::RandomPerTrial, 7).unwrap();
        assert!(matches!(sample_faults(&c, &m, 3).cc, CcPhases::Uniform(t) if (0.0..TAU).contains(&t)));
    }

    #[test]
    fn reproducible_per_trial() {
        let c = one_gate_circuit(GateKind::CX, vec![0, 1], 6);
        let m = NoiseModel::new(0.3, 1.0, CcPolicy::RandomPerTrial, 11).unwrap();
        assert_eq!(sample_faults(&c, &m, 5), sample_faults(&c, &m, 5));
        let distinct = (0..20).map(|t| sample_faults(&c, &m, t)).filter(|f| *f != sample_faults(&c, &m, 0)).count();
        assert!(distinct > 10);
    }

    #[test]
    fn single_qubit_letters_uniform() {
        let c = one_gate_circuit(GateKind::PauliX, vec![0], 1);
        let m = NoiseModel::new(1.0, 0.0, CcPolicy::Off, 1).unwrap();
        let sampler = FaultSampler::new(&c);
        let mut rng = trial_rng(1, 0);
        let mut counts = [0f64; 3];
        let trials = 30_000;
        for _ in 0..trials {
            let f = sampler.sample_paulis(&m, &mut rng);
            assert_eq!(f.len(), 1);
            match f[0].1 {
                Fault::Pauli1(l) => counts[l as usize - 1] += 1.0,
                other => panic!("{other:?}"),
            }
        }
        let e = trials as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - e) * (c - e) / e).sum();
        // 2 degrees of freedom, p = 0.001 critical value.
        assert!(chi2 < 13.8, "chi2 = {chi2}");
    }

    #[test]
    fn two_qubit_paulis_uniform() {
        let c = one_gate_circuit(GateKind::CZ, vec![0, 1], 2);
        let m = NoiseModel::new(0.15, 0.0, CcPolicy::Off, 2).unwrap();
        let sampler = FaultSampler::new(&c);
        let mut rng = trial_rng(2, 0);
        let mut counts = [0f64; 16];
        let trials = 200_000;
        for _ in 0..trials {
            for (_, f) in sampler.sample_paulis(&m, &mut rng) {
                match f {
                    Fault::Pauli2(a, b) => counts[4 * a as usize + b as usize] += 1.0,
                    other => panic!("{other:?}"),
                }
            }
        }
        assert_eq!(counts[0], 0.0);
        for c in &counts[1..] {
            let rate = c / trials as f64;
            let sigma = (0.01f64 * 0.99 / trials as f64).sqrt();
            assert!((rate - 0.01).abs() < 5.0 * sigma, "rate {rate}");
        }
    }

    #[test]
    fn class_rates_match_model() {
        // Each class gets many locations so geometric skipping is exercised.
        let mut c = LayeredCircuit::with_counts(40, 0);
        c.push_layer(Layer::new(vec![Gate::new(GateKind::PauliZ, vec![0]), Gate::two(GateKind::CX, 1, 2)]));
        c.push_layer(Layer::new(vec![Gate::new(GateKind::MeasZ, (0..40).collect::<Vec<_>>())]));
        let m = NoiseModel::new(0.01, 0.5, CcPolicy::Off, 3).unwrap();
        let sampler = FaultSampler::new(&c);
        let mut rng = trial_rng(3, 0);
        let mut hits = [0u64; 5];
        let trials = 100_000u64;
        for _ in 0..trials {
            for (loc, _) in sampler.sample_paulis(&m, &mut rng) {
                hits[sampler.locations()[loc as usize].kind as usize] += 1;
            }
        }
        let per_class = |k: LocationKind| sampler.locations().iter().filter(|l| l.kind == k).count() as f64;
        for kind in [LocationKind::Gate1, LocationKind::Gate2, LocationKind::Idle, LocationKind::Meas] {
            let n = per_class(kind) * trials as f64;
            let q = m.rate(kind);
            let sigma = (n * q * (1.0 - q)).sqrt();
            let got = hits[kind as usize] as f64;
            assert!((got - n * q).abs() < 5.0 * sigma, "{kind:?}: {got} vs {}", n * q);
        }
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(NoiseModel::new(1.5, 1.0, CcPolicy::Off, 0).is_err());
        assert!(NoiseModel::new(0.1, -1.0, CcPolicy::Off, 0).is_err());
        assert!(NoiseModel::new(0.1, 1.0, CcPolicy::Fixed(7.0), 0).is_err());
    }
}
