//! Dense state-vector reference simulator for small circuits.
//!
//! Qubit `i` is bit `i` of the basis index. Measured qubits are reset to
//! `|0⟩` right after their outcome is recorded, so later preparations always
//! start from a fresh qubit.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::bits::Bits;
use crate::circuit::{enumerate_locations, GateKind, LayeredCircuit, Location, Role};
use crate::code::{builtin, CssCode};
use crate::extraction::build_ce_cat;
use crate::frame::Calibration;
use crate::noise::{Fault, FaultAssignment};
use crate::pauli::{Letter, Pauli};

pub const MAX_QUBITS: usize = 14;
/// Above this many measured qubits the oracle samples instead of enumerating.
pub const EXACT_MEASUREMENT_LIMIT: usize = 20;

const PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooManyQubits { n: usize },
    UnknownCode(String),
    DirtyPrep { layer: usize, qubit: usize },
    Length { expected: usize, found: usize },
    OutcomeSpace { left: usize, right: usize },
    EmptyCodeSpace(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooManyQubits { n } => write!(f, "{n} qubits exceeds the oracle limit of {MAX_QUBITS}"),
            Self::UnknownCode(name) => write!(f, "unknown code {name}"),
            Self::DirtyPrep { layer, qubit } => {
                write!(f, "layer {layer}: qubit {qubit} is not in |0> at preparation")
            }
            Self::Length { expected, found } => write!(f, "expected {expected} entries, got {found}"),
            Self::OutcomeSpace { left, right } => {
                write!(f, "outcome spaces differ: {left} vs {right} bits")
            }
            Self::EmptyCodeSpace(name) => write!(f, "projection onto {name} vanished"),
        }
    }
}

impl core::error::Error for OracleError {}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n: usize) -> Result<Self, OracleError> {
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, OracleError> {
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { n });
        }
        if amps.len() != 1 << n {
            return Err(OracleError::Length { expected: 1 << n, found: amps.len() });
        }
        let mut s = Self { n, amps };
        s.normalize();
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn normalize(&mut self) -> f64 {
        let n = self.norm_sqr();
        if n > 0.0 {
            let s = 1.0 / libm::sqrt(n);
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
        n
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm()
    }

    pub fn apply_x(&mut self, q: usize) {
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    pub fn apply_z(&mut self, q: usize) {
        let m = 1usize << q;
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & m != 0).for_each(|(_, a)| *a = -*a);
    }

    pub fn apply_h(&mut self, q: usize) {
        let m = 1usize << q;
        let r = core::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (u, v) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (u + v) * r;
                self.amps[i | m] = (u - v) * r;
            }
        }
    }

    pub fn apply_letter(&mut self, q: usize, l: Letter) {
        match l {
            Letter::I => {}
            Letter::X => self.apply_x(q),
            Letter::Z => self.apply_z(q),
            Letter::Y => {
                self.apply_z(q);
                self.apply_x(q);
                self.amps.iter_mut().for_each(|a| *a *= Complex64::new(0.0, 1.0));
            }
        }
    }

    /// Applies `p` with its phase; `p.len()` must equal the qubit count.
    pub fn apply_pauli(&mut self, p: &Pauli) -> Result<(), OracleError> {
        if p.len() != self.n {
            return Err(OracleError::Length { expected: self.n, found: p.len() });
        }
        let x = mask_of(p.x());
        let z = mask_of(p.z());
        let ys = (x & z).count_ones() as u8;
        let base = i_power(p.phase().exponent().wrapping_add(ys));
        let old = core::mem::take(&mut self.amps);
        self.amps = vec![Complex64::new(0.0, 0.0); old.len()];
        for (i, a) in old.into_iter().enumerate() {
            let sign = if (i & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            self.amps[i ^ x] = a * base * sign;
        }
        Ok(())
    }

    /// Two-qubit gates of the circuit model.
    pub fn apply_gate(&mut self, kind: &GateKind, c: usize, t: usize) {
        let (mc, mt) = (1usize << c, 1usize << t);
        match kind {
            GateKind::CX | GateKind::C0X => {
                let want = if *kind == GateKind::CX { mc } else { 0 };
                for i in 0..self.amps.len() {
                    if i & mt == 0 && i & mc == want {
                        self.amps.swap(i, i | mt);
                    }
                }
            }
            GateKind::CZ | GateKind::C0Z => {
                let want = if *kind == GateKind::CZ { mc } else { 0 };
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mt != 0 && i & mc == want {
                        *a = -*a;
                    }
                }
            }
            _ => {}
        }
    }

    /// `exp(−iθ Σ_{j∈mask} Z_j)`.
    pub fn apply_collective_rotation(&mut self, mask: usize, theta: f64) {
        let w = mask.count_ones() as f64;
        for (i, a) in self.amps.iter_mut().enumerate() {
            let s = w - 2.0 * (i & mask).count_ones() as f64;
            *a *= Complex64::from_polar(1.0, -theta * s);
        }
    }

    /// `exp(iφ Z^c)`.
    pub fn apply_z_string_rotation(&mut self, support: usize, phi: f64) {
        let (p, m) = (Complex64::from_polar(1.0, phi), Complex64::from_polar(1.0, -phi));
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if (i & support).count_ones() % 2 == 0 { p } else { m };
        }
    }

    /// Probability of reading 1 on `q` in the computational basis.
    pub fn prob_one(&self, q: usize) -> f64 {
        let m = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projects `q` onto `outcome`, renormalizes and resets it to `|0⟩`.
    /// Returns the outcome probability.
    pub fn measure_z_and_reset(&mut self, q: usize, outcome: bool) -> f64 {
        let m = 1usize << q;
        let want = if outcome { m } else { 0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != want {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let p = self.normalize();
        if outcome {
            self.apply_x(q);
        }
        p
    }

    /// Places `local` (amplitudes over `qubits`, entry `k` of a local index
    /// being `qubits[k]`) onto qubits that are currently `|0⟩`.
    fn embed(&mut self, qubits: &[usize], local: &[Complex64]) -> Result<(), usize> {
        let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
        if let Some(q) = qubits.iter().copied().find(|&q| self.prob_one(q) > 1e-12) {
            return Err(q);
        }
        let spread: Vec<usize> = (0..local.len())
            .map(|b| qubits.iter().enumerate().filter(|(k, _)| b >> k & 1 == 1).map(|(_, q)| 1usize << q).sum())
            .collect();
        let old = core::mem::take(&mut self.amps);
        self.amps = vec![Complex64::new(0.0, 0.0); old.len()];
        for (i, a) in old.into_iter().enumerate() {
            if i & mask != 0 || a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, l) in local.iter().enumerate() {
                if *l != Complex64::new(0.0, 0.0) {
                    self.amps[i | spread[b]] += a * l;
                }
            }
        }
        Ok(())
    }
}

fn mask_of(b: &Bits) -> usize {
    b.ones_iter().map(|q| 1usize << q).sum()
}

fn i_power(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Amplitudes of the CE cat state on `2w` local qubits.
pub fn cat_state(w: usize) -> Vec<Complex64> {
    let m = 2 * w;
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << m];
    let odd: usize = (0..m).filter(|i| i % 2 == 1).map(|i| 1usize << i).sum();
    let even: usize = (0..m).filter(|i| i % 2 == 0).map(|i| 1usize << i).sum();
    let r = core::f64::consts::FRAC_1_SQRT_2;
    v[odd] = Complex64::new(r, 0.0);
    v[even] = Complex64::new(r, 0.0);
    v
}

/// Logical `|0…0⟩` or `|+…+⟩` of `code`, by projecting `|y⟩`.
pub fn code_state(code: &CssCode, plus: bool) -> Result<Vec<Complex64>, OracleError> {
    let n = code.n();
    let mut s = DenseState::zero(n)?;
    for q in code.shift_y().ones_iter() {
        s.apply_x(q);
    }
    let logicals = if plus { code.stabilizer().logical_x() } else { code.stabilizer().logical_z() };
    for g in code.generators().iter().chain(logicals) {
        let mut t = s.clone();
        t.apply_pauli(g)?;
        for (a, b) in s.amps.iter_mut().zip(&t.amps) {
            *a = (*a + b) * 0.5;
        }
        if s.normalize() < 1e-12 {
            return Err(OracleError::EmptyCodeSpace(String::from(code.name())));
        }
    }
    Ok(s.amps)
}

/// Exact outcome distribution, keyed by the per-qubit outcome bits
/// (entries of never-measured qubits are 0).
pub type Distribution = BTreeMap<Bits, f64>;

pub fn tvd(d1: &Distribution, d2: &Distribution) -> Result<f64, OracleError> {
    let len = |d: &Distribution| d.keys().next().map(Bits::len);
    if let (Some(l), Some(r)) = (len(d1), len(d2)) {
        if l != r || d1.keys().chain(d2.keys()).any(|k| k.len() != l) {
            return Err(OracleError::OutcomeSpace { left: l, right: r });
        }
    }
    let mut total = 0.0;
    for (k, p) in d1 {
        total += (p - d2.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, q) in d2 {
        if !d1.contains_key(k) {
            total += q.abs();
        }
    }
    Ok(0.5 * total)
}

#[derive(Debug, Clone)]
pub enum InitialData {
    Zero,
    Code { code: CssCode, plus: bool },
    Amplitudes(Vec<Complex64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    Auto,
    Exact,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub init: InitialData,
    /// Codes for logical preparations, searched before the builtins.
    pub codes: Vec<CssCode>,
    pub enumeration: Enumeration,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { init: InitialData::Zero, codes: Vec::new(), enumeration: Enumeration::Auto }
    }
}

/// One measurement history with its post-measurement state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub outcomes: Bits,
    pub state: DenseState,
}

struct Prepared<'a> {
    c: &'a LayeredCircuit,
    f: &'a FaultAssignment,
    locations: Vec<Location>,
    live_masks: Vec<usize>,
    preps: BTreeMap<(usize, usize), Vec<Complex64>>,
}

impl<'a> Prepared<'a> {
    fn new(c: &'a LayeredCircuit, f: &'a FaultAssignment, opts: &OracleOptions) -> Result<Self, OracleError> {
        let liveness = c.liveness();
        let live_masks = (0..c.depth()).map(|l| mask_of(&c.cc_live_mask(l, &liveness))).collect();
        let mut preps = BTreeMap::new();
        for (l, layer) in c.layers().iter().enumerate() {
            for (g, gate) in layer.gates.iter().enumerate() {
                let local = match &gate.kind {
                    GateKind::PrepCat(w) => cat_state(*w),
                    GateKind::PrepLogical0(name) => code_state(&resolve(name, opts)?, false)?,
                    GateKind::PrepLogicalPlus(name) => code_state(&resolve(name, opts)?, true)?,
                    _ => continue,
                };
                if local.len() != 1 << gate.qubits.len() {
                    return Err(OracleError::Length { expected: gate.qubits.len(), found: local.len().trailing_zeros() as usize });
                }
                preps.insert((l, g), local);
            }
        }
        Ok(Self { c, f, locations: enumerate_locations(c), live_masks, preps })
    }

    fn initial(&self, opts: &OracleOptions) -> Result<DenseState, OracleError> {
        let n = self.c.n_qubits();
        let mut s = DenseState::zero(n)?;
        let data: Vec<usize> = self.c.data_qubits().collect();
        let local = match &opts.init {
            InitialData::Zero => return Ok(s),
            InitialData::Code { code, plus } => {
                if code.n() != data.len() {
                    return Err(OracleError::Length { expected: data.len(), found: code.n() });
                }
                code_state(code, *plus)?
            }
            InitialData::Amplitudes(a) => a.clone(),
        };
        if local.len() != 1 << data.len() {
            return Err(OracleError::Length { expected: 1 << data.len(), found: local.len() });
        }
        s.embed(&data, &local).map_err(|q| OracleError::DirtyPrep { layer: 0, qubit: q })?;
        s.normalize();
        Ok(s)
    }

    /// Everything in layer `l` before its measurements; returns the qubits to
    /// measure in X and Z and the qubits whose outcome is flipped.
    fn unitary_part(&self, l: usize, s: &mut DenseState) -> Result<(), OracleError> {
        for (g, gate) in self.c.layers()[l].gates.iter().enumerate() {
            match &gate.kind {
                k if k.is_prep() => {
                    s.embed(&gate.qubits, &self.preps[&(l, g)])
                        .map_err(|qubit| OracleError::DirtyPrep { layer: l, qubit })?;
                }
                k if k.is_two_qubit() => s.apply_gate(k, gate.qubits[0], gate.qubits[1]),
                GateKind::PauliX => s.apply_x(gate.qubits[0]),
                GateKind::PauliZ => s.apply_z(gate.qubits[0]),
                _ => {}
            }
        }
        for (loc, fault) in self.layer_faults(l) {
            match fault {
                Fault::Pauli1(letter) => s.apply_letter(loc.qubit(), letter),
                Fault::Pauli2(a, b) => {
                    s.apply_letter(loc.qubits[0] as usize, a);
                    s.apply_letter(loc.qubits[1] as usize, b);
                }
                Fault::MeasFlip => {}
            }
        }
        if self.c.cc_enabled() {
            if let Some(theta) = self.f.cc.theta(l) {
                s.apply_collective_rotation(self.live_masks[l], theta);
            }
        }
        Ok(())
    }

    fn layer_faults(&self, l: usize) -> impl Iterator<Item = (Location, Fault)> + '_ {
        self.f
            .faults
            .iter()
            .map(|&(i, f)| (self.locations[i as usize], f))
            .filter(move |(loc, _)| loc.layer as usize == l)
    }

    fn measured(&self, l: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for gate in &self.c.layers()[l].gates {
            let x = match gate.kind {
                GateKind::MeasX => true,
                GateKind::MeasZ => false,
                _ => continue,
            };
            out.extend(gate.qubits.iter().map(|&q| (q, x)));
        }
        out
    }

    fn flips(&self, l: usize, outcomes: &mut Bits) {
        for (loc, f) in self.layer_faults(l) {
            if f == Fault::MeasFlip {
                outcomes.toggle(loc.qubit());
            }
        }
    }
}

fn resolve(name: &str, opts: &OracleOptions) -> Result<CssCode, OracleError> {
    if let Some(c) = opts.codes.iter().find(|c| c.name() == name) {
        return Ok(c.clone());
    }
    builtin(name).map_err(|_| OracleError::UnknownCode(String::from(name)))
}

fn validate_faults(c: &LayeredCircuit, f: &FaultAssignment) -> Result<(), OracleError> {
    let count = enumerate_locations(c).len();
    match f.faults.iter().find(|(i, _)| *i as usize >= count) {
        Some(&(i, _)) => Err(OracleError::Length { expected: count, found: i as usize + 1 }),
        None => Ok(()),
    }
}

/// Every measurement history with nonzero probability.
pub fn run_branches(
    c: &LayeredCircuit,
    f: &FaultAssignment,
    opts: &OracleOptions,
) -> Result<Vec<Branch>, OracleError> {
    if c.n_qubits() > MAX_QUBITS {
        return Err(OracleError::TooManyQubits { n: c.n_qubits() });
    }
    validate_faults(c, f)?;
    let prep = Prepared::new(c, f, opts)?;
    let n = c.n_qubits();
    let mut branches =
        vec![Branch { probability: 1.0, outcomes: Bits::zeros(n), state: prep.initial(opts)? }];
    for l in 0..c.depth() {
        for b in branches.iter_mut() {
            prep.unitary_part(l, &mut b.state)?;
        }
        for (q, x_basis) in prep.measured(l) {
            let mut next = Vec::with_capacity(branches.len() * 2);
            for mut b in branches {
                if x_basis {
                    b.state.apply_h(q);
                }
                let p1 = b.state.prob_one(q);
                for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p * b.probability < PRUNE {
                        continue;
                    }
                    let mut s = b.state.clone();
                    s.measure_z_and_reset(q, outcome);
                    let mut o = b.outcomes.clone();
                    o.set(q, outcome);
                    next.push(Branch { probability: b.probability * p, outcomes: o, state: s });
                }
            }
            branches = next;
        }
        for b in branches.iter_mut() {
            prep.flips(l, &mut b.outcomes);
        }
    }
    Ok(branches)
}

/// One sampled measurement history.
pub fn sample_branch<R: Rng>(
    c: &LayeredCircuit,
    f: &FaultAssignment,
    opts: &OracleOptions,
    rng: &mut R,
) -> Result<Branch, OracleError> {
    if c.n_qubits() > MAX_QUBITS {
        return Err(OracleError::TooManyQubits { n: c.n_qubits() });
    }
    validate_faults(c, f)?;
    let prep = Prepared::new(c, f, opts)?;
    let mut b = Branch { probability: 1.0, outcomes: Bits::zeros(c.n_qubits()), state: prep.initial(opts)? };
    for l in 0..c.depth() {
        prep.unitary_part(l, &mut b.state)?;
        for (q, x_basis) in prep.measured(l) {
            if x_basis {
                b.state.apply_h(q);
            }
            let outcome = rng.gen::<f64>() < b.state.prob_one(q);
            b.probability *= b.state.measure_z_and_reset(q, outcome);
            b.outcomes.set(q, outcome);
        }
        prep.flips(l, &mut b.outcomes);
    }
    Ok(b)
}

/// Outcome distribution of `c` under the fixed fault pattern `f`.
pub fn run_statevector(
    c: &LayeredCircuit,
    f: &FaultAssignment,
    opts: &OracleOptions,
) -> Result<Distribution, OracleError> {
    let measured = c
        .layers()
        .iter()
        .flat_map(|l| &l.gates)
        .filter(|g| g.kind.is_measurement())
        .map(|g| g.qubits.len())
        .sum::<usize>();
    let exact = match opts.enumeration {
        Enumeration::Exact => true,
        Enumeration::Auto => measured <= EXACT_MEASUREMENT_LIMIT,
        Enumeration::Sampled { .. } => false,
    };
    let mut d = Distribution::new();
    if exact {
        for b in run_branches(c, f, opts)? {
            *d.entry(b.outcomes).or_insert(0.0) += b.probability;
        }
    } else {
        let (samples, seed) = match opts.enumeration {
            Enumeration::Sampled { samples, seed } => (samples, seed),
            _ => (100_000, 0),
        };
        let w = 1.0 / samples as f64;
        for t in 0..samples {
            let mut rng = crate::noise::trial_rng(seed, t);
            let b = sample_branch(c, f, opts, &mut rng)?;
            *d.entry(b.outcomes).or_insert(0.0) += w;
        }
    }
    Ok(d)
}

/// One row of the calibration table.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCheck {
    pub name: &'static str,
    pub kappa: f64,
    /// `1 − |⟨lhs|rhs⟩|` at the chosen constant.
    pub residual: f64,
    pub literal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub calibration: Calibration,
    pub checks: Vec<CalibrationCheck>,
}

impl CalibrationReport {
    pub fn deviations(&self) -> impl Iterator<Item = &CalibrationCheck> {
        self.checks.iter().filter(|c| c.kappa != c.literal)
    }
}

const KAPPA_CANDIDATES: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn generic_state(n: usize, salt: u32) -> DenseState {
    let amps = (0..1usize << n)
        .map(|i| {
            let t = (i as f64 + 1.0) * (0.71 + 0.13 * salt as f64);
            Complex64::new(libm::cos(t) + 0.3, libm::sin(1.7 * t))
        })
        .collect();
    DenseState::from_amplitudes(n, amps).expect("small state")
}

fn best_kappa(mut residual: impl FnMut(f64) -> f64) -> (f64, f64) {
    KAPPA_CANDIDATES
        .iter()
        .map(|&k| (k, residual(k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates")
}

/// Derives the record propagation constants by comparing small unitaries.
///
/// For each two-qubit gate `G` (control 0, target 1) the constant `κ` is the
/// one for which `G·e^{iθZ_t} = e^{iκθ Z^S}·G` on generic states, with `S`
/// the target alone for diagonal gates and both qubits otherwise. For the CC
/// slot, the constant satisfies `U_cc·X_0|ψ⟩ ∝ e^{iκθZ_0}·X_0|ψ⟩` on the
/// two-qubit CE state `(|01⟩+|10⟩)/√2`.
pub fn calibrate() -> CalibrationReport {
    let theta = 0.37;
    let lit = Calibration::LITERAL;
    let mut checks = Vec::new();
    let gates = [
        ("cx", GateKind::CX, lit.cx),
        ("c0x", GateKind::C0X, lit.c0x),
        ("cz", GateKind::CZ, lit.cz),
        ("c0z", GateKind::C0Z, lit.c0z),
    ];
    for (name, kind, literal) in gates {
        let support = if matches!(kind, GateKind::CX | GateKind::C0X) { 0b11 } else { 0b10 };
        let (kappa, residual) = best_kappa(|k| {
            (0..3)
                .map(|salt| {
                    let mut lhs = generic_state(2, salt);
                    let mut rhs = lhs.clone();
                    lhs.apply_z_string_rotation(0b10, theta);
                    lhs.apply_gate(&kind, 0, 1);
                    rhs.apply_gate(&kind, 0, 1);
                    rhs.apply_z_string_rotation(support, k * theta);
                    1.0 - lhs.overlap(&rhs)
                })
                .fold(0.0, f64::max)
        });
        checks.push(CalibrationCheck { name, kappa, residual, literal });
    }
    let (kappa, residual) = best_kappa(|k| {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let psi = vec![z, Complex64::new(r, 0.0), Complex64::new(r, 0.0), z];
        let mut lhs = DenseState::from_amplitudes(2, psi).expect("two qubits");
        lhs.apply_x(0);
        let mut rhs = lhs.clone();
        lhs.apply_collective_rotation(0b11, theta);
        rhs.apply_z_string_rotation(0b01, k * theta);
        1.0 - lhs.overlap(&rhs)
    });
    checks.insert(0, CalibrationCheck { name: "cc", kappa, residual, literal: lit.cc });
    let get = |n: &str| checks.iter().find(|c| c.name == n).map(|c| c.kappa).expect("present");
    let calibration =
        Calibration { cc: get("cc"), cx: get("cx"), c0x: get("c0x"), cz: get("cz"), c0z: get("c0z") };
    CalibrationReport { calibration, checks }
}

/// Checks the cat preparation against its stabilizers; used by tests and
/// by the CLI's self-check.
pub fn cat_state_is_stabilized(w: usize) -> bool {
    let Ok(spec) = build_ce_cat(w) else { return false };
    let m = 2 * w;
    let Ok(psi) = DenseState::from_amplitudes(m, cat_state(w)) else { return false };
    spec.stabilizers.iter().all(|g| {
        let mut t = psi.clone();
        t.apply_pauli(g).is_ok() && {
            let ov: Complex64 = psi.amps.iter().zip(&t.amps).map(|(a, b)| a.conj() * b).sum();
            (ov - Complex64::new(1.0, 0.0)).norm() < 1e-10
        }
    })
}

/// Roles helper for hand-built oracle circuits.
pub fn roles(n_data: usize, n_ancilla: usize) -> Vec<Role> {
    let mut r = vec![Role::Data; n_data];
    r.extend(core::iter::repeat_n(Role::Ancilla, n_ancilla));
    r
}
