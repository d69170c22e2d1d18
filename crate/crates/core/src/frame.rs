//! Pauli-frame simulation extended with coherent Z-rotation records.
//!
//! The simulated state is `R · X^a Z^b · |ψ_ref⟩` where `|ψ_ref⟩` is the
//! fault-free reference evolution and `R` is a product of records
//! `exp(i φ Z^c)`. Records sit to the left of the frame, so inserting a
//! Pauli with an X part on qubit `j` conjugates every record whose support
//! contains `j` (`φ → −φ`).
//!
//! A CC slot of angle θ adds `(κ_cc θ, e_j)` for each live qubit with
//! `a_j = 1`. This relies on the reference state being an eigenstate of the
//! collective rotation on the live qubits, which holds whenever every
//! prepared block and every completed gadget is constant-excitation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::bits::{Bits, Hex};
use crate::circuit::{enumerate_locations, GateKind, LayeredCircuit, Location, LocationKind};
use crate::noise::{Fault, FaultAssignment};
use crate::pauli::{Letter, Pauli, Phase};

/// Multipliers applied to record phases.
///
/// `cc` scales the CC angle when a record is created. The gate entries scale
/// the phase of a record whose support contains the gate's target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub cc: f64,
    pub cx: f64,
    pub c0x: f64,
    pub cz: f64,
    pub c0z: f64,
}

impl Calibration {
    /// Constants obtained by comparing conjugated unitaries; see
    /// [`crate::oracle::calibrate`].
    pub const DERIVED: Self = Self { cc: -2.0, cx: 1.0, c0x: -1.0, cz: 1.0, c0z: 1.0 };

    /// The literal update rule with `θ ← −2θ` for both zero-controlled gates.
    pub const LITERAL: Self = Self { cc: -2.0, cx: 1.0, c0x: -2.0, cz: 1.0, c0z: -2.0 };

    fn for_gate(&self, kind: &GateKind) -> f64 {
        match kind {
            GateKind::CX => self.cx,
            GateKind::C0X => self.c0x,
            GateKind::CZ => self.cz,
            GateKind::C0Z => self.c0z,
            _ => 1.0,
        }
    }
}

impl Default for Calibration {
    fn default() -> Self {
        Self::DERIVED
    }
}

/// What to do when several records touch one X-measured qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapPolicy {
    #[default]
    Reject,
    /// Collapse the records one after another as if independent; counted in
    /// [`SimState::overlap_events`].
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameError {
    Overlap { layer: usize, qubit: usize, records: usize },
    FaultOutOfRange { location: u32 },
    Length { expected: usize, found: usize },
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Overlap { layer, qubit, records } => write!(
                f,
                "layer {layer}: {records} coherent records overlap measured qubit {qubit}"
            ),
            Self::FaultOutOfRange { location } => write!(f, "fault at unknown location {location}"),
            Self::Length { expected, found } => write!(f, "expected {expected} qubits, got {found}"),
        }
    }
}

impl core::error::Error for FrameError {}

/// `exp(i·phi·Z^support)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentRecord {
    pub phi: f64,
    pub support: Bits,
}

impl CoherentRecord {
    #[inline]
    pub fn flip_probability(&self) -> f64 {
        let s = libm::sin(self.phi);
        s * s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub a: Bits,
    pub b: Bits,
    pub records: Vec<CoherentRecord>,
    /// Outcome flips relative to the reference, per qubit.
    pub outcomes: Bits,
    pub measured: Bits,
    pub overlap_events: u32,
}

impl SimState {
    pub fn new(n: usize) -> Self {
        Self {
            a: Bits::zeros(n),
            b: Bits::zeros(n),
            records: Vec::new(),
            outcomes: Bits::zeros(n),
            measured: Bits::zeros(n),
            overlap_events: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.a.len()
    }

    /// Inserts a Pauli at the current time.
    pub fn apply_pauli(&mut self, p: &Pauli) -> Result<(), FrameError> {
        if p.len() > self.a.len() {
            return Err(FrameError::Length { expected: self.a.len(), found: p.len() });
        }
        for q in p.x().ones_iter() {
            self.apply_x(q);
        }
        for q in p.z().ones_iter() {
            self.b.toggle(q);
        }
        Ok(())
    }

    #[inline]
    fn apply_x(&mut self, q: usize) {
        self.a.toggle(q);
        for r in self.records.iter_mut() {
            if r.support.get(q) {
                r.phi = -r.phi;
            }
        }
    }

    #[inline]
    fn apply_letter(&mut self, q: usize, l: Letter) {
        let (x, z) = l.bits();
        if x {
            self.apply_x(q);
        }
        if z {
            self.b.toggle(q);
        }
    }

    fn add_record(&mut self, phi: f64, support: Bits) {
        if let Some(r) = self.records.iter_mut().find(|r| r.support == support) {
            r.phi += phi;
        } else {
            self.records.push(CoherentRecord { phi, support });
        }
    }

    fn merge_records(&mut self) {
        if self.records.len() < 2 {
            return;
        }
        let mut i = 0;
        while i < self.records.len() {
            let mut j = i + 1;
            while j < self.records.len() {
                if self.records[j].support == self.records[i].support {
                    let extra = self.records.swap_remove(j).phi;
                    self.records[i].phi += extra;
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
    }

    /// Frame restricted to qubits `0..n`, phase ignored.
    pub fn data_error(&self, n: usize) -> Pauli {
        Pauli::from_parts(Phase::PlusOne, self.a.resized(n), self.b.resized(n)).expect("equal lengths")
    }

    /// Clears the frame on `0..n` by applying `correction` there.
    pub fn apply_correction(&mut self, correction: &Pauli) -> Result<(), FrameError> {
        self.apply_pauli(correction)
    }
}

/// Collapses every surviving record: with probability `sin²φ` its Z string
/// is added to the frame.
pub fn finalize_records<R: Rng>(s: &mut SimState, rng: &mut R) {
    for r in core::mem::take(&mut s.records) {
        if rng.gen::<f64>() < r.flip_probability() {
            s.b ^= &r.support;
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Prep(Vec<usize>),
    Two(GateKind, usize, usize),
    X(usize),
}

#[derive(Debug, Clone)]
struct CompiledLayer {
    ops: Vec<Op>,
    meas_x: Vec<usize>,
    meas_z: Vec<usize>,
    loc_start: u32,
    loc_end: u32,
    cc_live: Option<Bits>,
}

/// A circuit prepared for repeated frame simulation.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    n: usize,
    layers: Vec<CompiledLayer>,
    locations: Vec<Location>,
    calibration: Calibration,
    overlap: OverlapPolicy,
}

/// One line of a simulation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub layer: usize,
    pub kind: &'static str,
    pub a: Bits,
    pub b: Bits,
    pub records: Vec<CoherentRecord>,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let recs: Vec<String> =
            self.records.iter().map(|r| format!("({:.6},{})", r.phi, Hex(&r.support))).collect();
        write!(
            f,
            "t={} kind={} a={} b={} records=[{}]",
            self.layer,
            self.kind,
            Hex(&self.a),
            Hex(&self.b),
            recs.join(",")
        )
    }
}

impl FrameSimulator {
    pub fn new(c: &LayeredCircuit) -> Self {
        Self::with_options(c, Calibration::DERIVED, OverlapPolicy::Reject)
    }

    pub fn with_options(c: &LayeredCircuit, calibration: Calibration, overlap: OverlapPolicy) -> Self {
        let locations = enumerate_locations(c);
        let liveness = c.liveness();
        let mut layers = Vec::with_capacity(c.depth());
        let mut cursor = 0usize;
        for (l, layer) in c.layers().iter().enumerate() {
            let mut ops = Vec::new();
            let mut meas_x = Vec::new();
            let mut meas_z = Vec::new();
            for g in &layer.gates {
                match &g.kind {
                    k if k.is_prep() => ops.push(Op::Prep(g.qubits.clone())),
                    k if k.is_two_qubit() => ops.push(Op::Two(k.clone(), g.qubits[0], g.qubits[1])),
                    GateKind::PauliX => ops.push(Op::X(g.qubits[0])),
                    GateKind::PauliZ => {}
                    GateKind::MeasX => meas_x.extend_from_slice(&g.qubits),
                    GateKind::MeasZ => meas_z.extend_from_slice(&g.qubits),
                    _ => unreachable!("all gate kinds handled"),
                }
            }
            let start = cursor;
            while cursor < locations.len() && locations[cursor].layer as usize == l {
                cursor += 1;
            }
            let cc_live = c.cc_enabled().then(|| c.cc_live_mask(l, &liveness));
            layers.push(CompiledLayer {
                ops,
                meas_x,
                meas_z,
                loc_start: start as u32,
                loc_end: cursor as u32,
                cc_live,
            });
        }
        Self { n: c.n_qubits(), layers, locations, calibration, overlap }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn calibration(&self) -> Calibration {
        self.calibration
    }

    /// Number of CC phase slots, one per layer when CC is enabled.
    pub fn cc_slots(&self) -> usize {
        if self.layers.iter().any(|l| l.cc_live.is_some()) {
            self.layers.len()
        } else {
            0
        }
    }

    /// Runs from a clean frame.
    pub fn simulate<R: Rng>(&self, f: &FaultAssignment, rng: &mut R) -> Result<SimState, FrameError> {
        let mut s = SimState::new(self.n);
        self.run(&mut s, f, rng, None)?;
        Ok(s)
    }

    /// Continues from `s`, e.g. a second extraction round on the same data.
    pub fn run<R: Rng>(
        &self,
        s: &mut SimState,
        f: &FaultAssignment,
        rng: &mut R,
        mut trace: Option<&mut Vec<TraceEvent>>,
    ) -> Result<(), FrameError> {
        if s.n_qubits() != self.n {
            return Err(FrameError::Length { expected: self.n, found: s.n_qubits() });
        }
        if let Some(&(loc, _)) = f.faults.last() {
            if loc as usize >= self.locations.len() {
                return Err(FrameError::FaultOutOfRange { location: loc });
            }
        }
        let mut fault_idx = 0usize;
        let mut pending_flips: Vec<usize> = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            for op in &layer.ops {
                self.apply_op(s, op);
            }
            pending_flips.clear();
            while fault_idx < f.faults.len() && f.faults[fault_idx].0 < layer.loc_end {
                let (loc, fault) = f.faults[fault_idx];
                debug_assert!(loc >= layer.loc_start);
                let location = self.locations[loc as usize];
                match fault {
                    Fault::Pauli1(letter) => s.apply_letter(location.qubit(), letter),
                    Fault::Pauli2(l0, l1) => {
                        s.apply_letter(location.qubits[0] as usize, l0);
                        s.apply_letter(location.qubits[1] as usize, l1);
                    }
                    Fault::MeasFlip => {
                        debug_assert_eq!(location.kind, LocationKind::Meas);
                        pending_flips.push(location.qubit());
                    }
                }
                fault_idx += 1;
            }
            if let Some(t) = trace.as_deref_mut() {
                push_trace(t, l, "faults", s);
            }
            if let (Some(live), Some(theta)) = (&layer.cc_live, f.cc.theta(l)) {
                let phi = self.calibration.cc * theta;
                let mut hit = s.a.clone();
                hit &= live;
                for q in hit.ones_iter() {
                    s.add_record(phi, Bits::unit(self.n, q));
                }
                if let Some(t) = trace.as_deref_mut() {
                    push_trace(t, l, "cc", s);
                }
            }
            for &q in &layer.meas_x {
                self.measure_x(s, q, l, rng)?;
            }
            for &q in &layer.meas_z {
                measure_z(s, q, rng);
            }
            for &q in &pending_flips {
                s.outcomes.toggle(q);
            }
            if !(layer.meas_x.is_empty() && layer.meas_z.is_empty()) {
                if let Some(t) = trace.as_deref_mut() {
                    push_trace(t, l, "measure", s);
                }
            }
        }
        Ok(())
    }

    fn apply_op(&self, s: &mut SimState, op: &Op) {
        match op {
            Op::Prep(qs) => {
                for &q in qs {
                    s.a.set(q, false);
                    s.b.set(q, false);
                    s.outcomes.set(q, false);
                    s.measured.set(q, false);
                }
                debug_assert!(s.records.iter().all(|r| qs.iter().all(|&q| !r.support.get(q))));
            }
            Op::X(q) => {
                for r in s.records.iter_mut() {
                    if r.support.get(*q) {
                        r.phi = -r.phi;
                    }
                }
            }
            Op::Two(kind, c, t) => {
                let (c, t) = (*c, *t);
                match kind {
                    GateKind::CX | GateKind::C0X => {
                        if s.a.get(c) {
                            s.a.toggle(t);
                        }
                        if s.b.get(t) {
                            s.b.toggle(c);
                        }
                    }
                    _ => {
                        let (ac, at) = (s.a.get(c), s.a.get(t));
                        if at {
                            s.b.toggle(c);
                        }
                        if ac {
                            s.b.toggle(t);
                        }
                    }
                }
                if s.records.is_empty() {
                    return;
                }
                let kappa = self.calibration.for_gate(kind);
                let spreads = matches!(kind, GateKind::CX | GateKind::C0X);
                let mut changed = false;
                for r in s.records.iter_mut() {
                    if r.support.get(t) {
                        if spreads {
                            r.support.toggle(c);
                            changed = true;
                        }
                        r.phi *= kappa;
                    }
                }
                s.records.retain(|r| !r.support.is_zero());
                if changed {
                    s.merge_records();
                }
            }
        }
    }

    fn measure_x<R: Rng>(&self, s: &mut SimState, q: usize, layer: usize, rng: &mut R) -> Result<(), FrameError> {
        let mut flip = s.b.get(q);
        let hits = s.records.iter().filter(|r| r.support.get(q)).count();
        if hits > 1 {
            match self.overlap {
                OverlapPolicy::Reject => return Err(FrameError::Overlap { layer, qubit: q, records: hits }),
                OverlapPolicy::Sequential => s.overlap_events += 1,
            }
        }
        if hits > 0 {
            let mut i = 0;
            while i < s.records.len() {
                if s.records[i].support.get(q) {
                    let r = s.records.swap_remove(i);
                    if rng.gen::<f64>() < r.flip_probability() {
                        flip = !flip;
                        s.b ^= &r.support;
                        s.b.toggle(q);
                    }
                } else {
                    i += 1;
                }
            }
        }
        s.outcomes.set(q, flip);
        s.measured.set(q, true);
        Ok(())
    }
}

/// Z measurement: a Z string through the measured qubit reduces to `±` its
/// remainder. The sign depends on the reference outcome, which a frame
/// simulator does not track, so it is drawn uniformly.
fn measure_z<R: Rng>(s: &mut SimState, q: usize, rng: &mut R) {
    let flip = s.a.get(q);
    if s.records.iter().any(|r| r.support.get(q)) {
        for r in s.records.iter_mut() {
            if r.support.get(q) {
                r.support.set(q, false);
                if rng.gen::<bool>() {
                    r.phi = -r.phi;
                }
            }
        }
        s.records.retain(|r| !r.support.is_zero());
        s.merge_records();
    }
    s.outcomes.set(q, flip);
    s.measured.set(q, true);
}

fn push_trace(t: &mut Vec<TraceEvent>, layer: usize, kind: &'static str, s: &SimState) {
    t.push(TraceEvent { layer, kind, a: s.a.clone(), b: s.b.clone(), records: s.records.clone() });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{insert_cc_layers, Gate, Layer};
    use crate::noise::{trial_rng, CcPhases};
    use alloc::string::ToString;
    use alloc::vec;

    fn fixed(theta: f64, faults: Vec<(u32, Fault)>) -> FaultAssignment {
        FaultAssignment { faults, cc: CcPhases::Uniform(theta) }
    }

    // Data qubit 0 idles through one layer (X fault lands there), ancilla
    // pair 1,2 is a w=1 CE cat, CX from ancilla 1 onto the data, then MX.
    fn gadget() -> LayeredCircuit {
        let mut c = LayeredCircuit::with_counts(1, 2);
        c.push_layer(Layer::new(vec![Gate::new(GateKind::PrepCat(1), vec![1, 2])]));
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 1, 0)]));
        c.push_layer(Layer::new(vec![Gate::new(GateKind::MeasX, vec![1, 2])]));
        insert_cc_layers(&c)
    }

    #[test]
    fn fault_free_runs_are_trivial() {
        let c = gadget();
        let sim = FrameSimulator::new(&c);
        let mut rng = trial_rng(0, 0);
        let s = sim.simulate(&fixed(0.3, vec![]), &mut rng).unwrap();
        assert!(s.a.is_zero() && s.b.is_zero() && s.records.is_empty() && s.outcomes.is_zero());
    }

    #[test]
    fn x_fault_spreads_record_and_collapses() {
        let c = gadget();
        let sim = FrameSimulator::new(&c);
        // Location 2 is the idle data qubit in layer 0.
        assert_eq!(sim.locations()[2].kind, LocationKind::Idle);
        let theta = 0.3;
        let f = fixed(theta, vec![(2, Fault::Pauli1(Letter::X))]);
        let mut trace = Vec::new();
        let mut rng = trial_rng(0, 1);
        let mut s = SimState::new(3);
        sim.run(&mut s, &f, &mut rng, Some(&mut trace)).unwrap();
        let after_gate = trace.iter().find(|e| e.layer == 1 && e.kind == "faults").unwrap();
        assert_eq!(after_gate.records.len(), 1);
        assert_eq!(after_gate.records[0].support.to_string(), "110");
        assert!((after_gate.records[0].phi - (-2.0 * theta)).abs() < 1e-12);
        let mut flips = 0;
        let trials = 40_000;
        for t in 0..trials {
            let mut rng = trial_rng(9, t);
            let s = sim.simulate(&f, &mut rng).unwrap();
            if s.outcomes.get(1) {
                flips += 1;
            }
        }
        // Records: -2θ after the first slot on {0}, moved to {0,1} by the CX,
        // plus -2θ on {0} at the second slot; the third slot adds another.
        let p = libm::sin(2.0 * theta).powi(2);
        let rate = flips as f64 / trials as f64;
        assert!((rate - p).abs() < 5.0 * (p * (1.0 - p) / trials as f64).sqrt(), "{rate} vs {p}");
        assert!(s.records.iter().all(|r| !r.support.get(1) && !r.support.get(2)));
    }

    #[test]
    fn full_period_record_is_harmless() {
        let mut c = LayeredCircuit::with_counts(1, 0);
        c.push_layer(Layer::default());
        let c = insert_cc_layers(&c);
        let sim = FrameSimulator::new(&c);
        let f = fixed(core::f64::consts::FRAC_PI_2, vec![(0, Fault::Pauli1(Letter::X))]);
        let mut rng = trial_rng(0, 0);
        let mut s = sim.simulate(&f, &mut rng).unwrap();
        assert_eq!(s.records.len(), 1);
        assert!(s.records[0].flip_probability() < 1e-20);
        finalize_records(&mut s, &mut rng);
        assert!(s.b.is_zero());
    }

    #[test]
    fn later_x_fault_conjugates_records() {
        let mut s = SimState::new(2);
        s.add_record(0.4, Bits::from_indices(2, [0, 1]));
        s.apply_pauli(&"XI".parse().unwrap()).unwrap();
        assert!((s.records[0].phi + 0.4).abs() < 1e-15);
        s.apply_pauli(&"XX".parse().unwrap()).unwrap();
        assert!((s.records[0].phi + 0.4).abs() < 1e-15);
    }

    #[test]
    fn records_merge_by_support() {
        let mut s = SimState::new(3);
        s.add_record(0.1, Bits::unit(3, 0));
        s.add_record(0.2, Bits::unit(3, 0));
        assert_eq!(s.records.len(), 1);
        assert!((s.records[0].phi - 0.3).abs() < 1e-15);
    }

    #[test]
    fn finalize_examples() {
        let mut rng = trial_rng(4, 0);
        let mut s = SimState::new(1);
        finalize_records(&mut s, &mut rng);
        assert!(s.b.is_zero());
        s.add_record(core::f64::consts::FRAC_PI_2, Bits::unit(1, 0));
        finalize_records(&mut s, &mut rng);
        assert!(s.b.get(0));
        let mut hits = 0;
        let trials = 20_000;
        for _ in 0..trials {
            let mut s = SimState::new(1);
            s.add_record(core::f64::consts::FRAC_PI_4, Bits::unit(1, 0));
            finalize_records(&mut s, &mut rng);
            hits += s.b.get(0) as u32;
        }
        let rate = hits as f64 / trials as f64;
        assert!((rate - 0.5).abs() < 0.02);
    }

    #[test]
    fn overlap_is_rejected_by_default() {
        let mut c = LayeredCircuit::with_counts(2, 2);
        c.push_layer(Layer::new(vec![Gate::new(GateKind::PrepCat(1), vec![2, 3])]));
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 2, 0)]));
        c.push_layer(Layer::new(vec![Gate::new(GateKind::MeasX, vec![2, 3])]));
        let sim = FrameSimulator::new(&c);
        let mut s = SimState::new(4);
        s.add_record(0.3, Bits::from_indices(4, [0]));
        s.add_record(0.2, Bits::from_indices(4, [0, 1]));
        let mut rng = trial_rng(0, 0);
        let err = sim.run(&mut s, &FaultAssignment::none(), &mut rng, None).unwrap_err();
        assert!(matches!(err, FrameError::Overlap { qubit: 2, records: 2, .. }));
        let seq = FrameSimulator::with_options(&c, Calibration::DERIVED, OverlapPolicy::Sequential);
        let mut s = SimState::new(4);
        s.add_record(0.3, Bits::from_indices(4, [0]));
        s.add_record(0.2, Bits::from_indices(4, [0, 1]));
        seq.run(&mut s, &FaultAssignment::none(), &mut rng, None).unwrap();
        assert_eq!(s.overlap_events, 1);
    }

    #[test]
    fn trace_format() {
        let e = TraceEvent {
            layer: 3,
            kind: "cc",
            a: Bits::from_u64(8, 0x12),
            b: Bits::zeros(8),
            records: vec![CoherentRecord { phi: -0.5, support: Bits::from_u64(8, 0x3) }],
        };
        assert_eq!(e.to_string(), "t=3 kind=cc a=12 b=00 records=[(-0.500000,03)]");
    }
}
