//! Layered circuits over data and ancilla qubits, fault locations, and
//! collective-coherent (CC) slots.
//!
//! Within one layer the execution order is: gates and preparations, then
//! the Pauli faults of that layer's locations, then the CC slot (if
//! enabled), then measurements. A CC slot therefore acts on qubits that are
//! measured in the same layer before their outcome is taken.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Data,
    Ancilla,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// `(|01⟩^⊗w + |10⟩^⊗w)/√2` on `2w` qubits.
    PrepCat(usize),
    /// Logical `|0…0⟩` of the named code.
    PrepLogical0(String),
    /// Logical `|+…+⟩` of the named code.
    PrepLogicalPlus(String),
    CX,
    /// NOT on the target when the control is `|0⟩`.
    C0X,
    CZ,
    /// Z on the target when the control is `|0⟩`.
    C0Z,
    PauliX,
    PauliZ,
    MeasX,
    MeasZ,
}

impl GateKind {
    pub fn is_prep(&self) -> bool {
        matches!(self, Self::PrepCat(_) | Self::PrepLogical0(_) | Self::PrepLogicalPlus(_))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Self::MeasX | Self::MeasZ)
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Self::CX | Self::C0X | Self::CZ | Self::C0Z)
    }

    pub fn is_single_qubit(&self) -> bool {
        matches!(self, Self::PauliX | Self::PauliZ)
    }

    fn arity_ok(&self, count: usize) -> bool {
        match self {
            Self::PrepCat(w) => *w >= 1 && count == 2 * w,
            Self::PrepLogical0(_) | Self::PrepLogicalPlus(_) | Self::MeasX | Self::MeasZ => count >= 1,
            Self::CX | Self::C0X | Self::CZ | Self::C0Z => count == 2,
            Self::PauliX | Self::PauliZ => count == 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    /// Control first for two-qubit kinds.
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: impl Into<Vec<usize>>) -> Self {
        Self { kind, qubits: qubits.into() }
    }

    pub fn two(kind: GateKind, control: usize, target: usize) -> Self {
        Self { kind, qubits: vec![control, target] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Layer {
    pub gates: Vec<Gate>,
}

impl Layer {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCircuit {
    n_qubits: usize,
    roles: Vec<Role>,
    layers: Vec<Layer>,
    cc_enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    QubitOutOfRange,
    BadArity,
    DuplicateQubit,
    Overlap,
    UseBeforePreparation,
    UseAfterMeasurement,
    RepeatedPreparation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub layer: usize,
    pub qubit: Option<usize>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            DiagnosticKind::QubitOutOfRange => "qubit index out of range",
            DiagnosticKind::BadArity => "wrong number of qubits for gate",
            DiagnosticKind::DuplicateQubit => "qubit repeated within a gate",
            DiagnosticKind::Overlap => "qubit used by two gates in one layer",
            DiagnosticKind::UseBeforePreparation => "ancilla used before preparation",
            DiagnosticKind::UseAfterMeasurement => "qubit used after measurement",
            DiagnosticKind::RepeatedPreparation => "qubit prepared twice",
        };
        match self.qubit {
            Some(q) => write!(f, "layer {}: {what} (qubit {q})", self.layer),
            None => write!(f, "layer {}: {what}", self.layer),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocationKind {
    Prep,
    Gate1,
    Gate2,
    Idle,
    Meas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub layer: u32,
    pub kind: LocationKind,
    /// Second entry is meaningful only for [`LocationKind::Gate2`].
    pub qubits: [u32; 2],
}

impl Location {
    pub fn qubit(&self) -> usize {
        self.qubits[0] as usize
    }
}

/// Per-qubit lifetime, `None` meaning "never".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Liveness {
    pub live_from: Vec<Option<usize>>,
    pub measured_at: Vec<Option<usize>>,
}

impl Liveness {
    /// Qubit exists in layer `l`: prepared at or before it and not measured earlier.
    pub fn live_at(&self, q: usize, l: usize) -> bool {
        self.live_from[q].is_some_and(|s| s <= l) && self.measured_at[q].is_none_or(|m| m >= l)
    }
}

impl LayeredCircuit {
    pub fn new(roles: Vec<Role>) -> Self {
        Self { n_qubits: roles.len(), roles, layers: Vec::new(), cc_enabled: false }
    }

    /// `n_data` data qubits followed by `n_ancilla` ancillas.
    pub fn with_counts(n_data: usize, n_ancilla: usize) -> Self {
        let mut roles = vec![Role::Data; n_data];
        roles.extend(core::iter::repeat_n(Role::Ancilla, n_ancilla));
        Self::new(roles)
    }

    pub fn push_layer(&mut self, layer: Layer) {
        self.layers.push(layer);
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn cc_enabled(&self) -> bool {
        self.cc_enabled
    }

    pub fn set_cc_enabled(&mut self, on: bool) {
        self.cc_enabled = on;
    }

    /// Number of CC slots: one per layer when enabled.
    pub fn cc_slot_count(&self) -> usize {
        if self.cc_enabled {
            self.layers.len()
        } else {
            0
        }
    }

    pub fn data_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles.iter().enumerate().filter(|(_, r)| **r == Role::Data).map(|(i, _)| i)
    }

    pub fn n_data(&self) -> usize {
        self.data_qubits().count()
    }

    /// Checks every structural invariant and lists all violations found.
    pub fn validate(&self) -> Result<(), Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let n = self.n_qubits;
        let mut prepared = vec![false; n];
        let mut measured = vec![false; n];
        let mut used = vec![false; n];
        for (l, layer) in self.layers.iter().enumerate() {
            let mut touched = vec![false; n];
            for gate in &layer.gates {
                if !gate.kind.arity_ok(gate.qubits.len()) {
                    diags.push(Diagnostic { layer: l, qubit: gate.qubits.first().copied(), kind: DiagnosticKind::BadArity });
                }
                for (i, &q) in gate.qubits.iter().enumerate() {
                    if q >= n {
                        diags.push(Diagnostic { layer: l, qubit: Some(q), kind: DiagnosticKind::QubitOutOfRange });
                        continue;
                    }
                    if gate.qubits[..i].contains(&q) {
                        diags.push(Diagnostic { layer: l, qubit: Some(q), kind: DiagnosticKind::DuplicateQubit });
                        continue;
                    }
                    if touched[q] {
                        diags.push(Diagnostic { layer: l, qubit: Some(q), kind: DiagnosticKind::Overlap });
                    }
                    touched[q] = true;
                    if measured[q] {
                        diags.push(Diagnostic { layer: l, qubit: Some(q), kind: DiagnosticKind::UseAfterMeasurement });
                    }
                    if gate.kind.is_prep() {
                        if prepared[q] || used[q] {
                            diags.push(Diagnostic { layer: l, qubit: Some(q), kind: DiagnosticKind::RepeatedPreparation });
                        }
                        prepared[q] = true;
                    } else if self.roles[q] == Role::Ancilla && !prepared[q] {
                        diags.push(Diagnostic { layer: l, qubit: Some(q), kind: DiagnosticKind::UseBeforePreparation });
                    }
                    used[q] = true;
                }
            }
            for gate in &layer.gates {
                if gate.kind.is_measurement() {
                    for &q in &gate.qubits {
                        if q < n {
                            measured[q] = true;
                        }
                    }
                }
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    pub fn liveness(&self) -> Liveness {
        let n = self.n_qubits;
        let mut live_from: Vec<Option<usize>> =
            self.roles.iter().map(|r| if *r == Role::Data { Some(0) } else { None }).collect();
        let mut first_prep: Vec<Option<usize>> = vec![None; n];
        let mut first_use: Vec<Option<usize>> = vec![None; n];
        let mut measured_at = vec![None; n];
        for (l, layer) in self.layers.iter().enumerate() {
            for gate in &layer.gates {
                for &q in &gate.qubits {
                    first_use[q].get_or_insert(l);
                    if gate.kind.is_prep() {
                        first_prep[q].get_or_insert(l);
                    }
                    if gate.kind.is_measurement() {
                        measured_at[q].get_or_insert(l);
                    }
                }
            }
        }
        for q in 0..n {
            if let Some(p) = first_prep[q] {
                if first_use[q] == Some(p) {
                    live_from[q] = Some(p);
                }
            }
        }
        Liveness { live_from, measured_at }
    }

    /// Qubits acted on by the CC slot after layer `l`.
    pub fn cc_live_mask(&self, l: usize, liveness: &Liveness) -> Bits {
        Bits::from_indices(self.n_qubits, (0..self.n_qubits).filter(|&q| liveness.live_at(q, l)))
    }
}

/// Every fault location in deterministic order: per layer, each gate in
/// order (one location per prepared or measured qubit, one per unitary
/// gate), then the idle live qubits of the layer in ascending order.
pub fn enumerate_locations(c: &LayeredCircuit) -> Vec<Location> {
    let liveness = c.liveness();
    let n = c.n_qubits();
    let mut out = Vec::new();
    for (l, layer) in c.layers().iter().enumerate() {
        let lu = l as u32;
        let mut touched = vec![false; n];
        for gate in &layer.gates {
            for &q in &gate.qubits {
                touched[q] = true;
            }
            let kind = &gate.kind;
            if kind.is_prep() || kind.is_measurement() {
                let lk = if kind.is_prep() { LocationKind::Prep } else { LocationKind::Meas };
                for &q in &gate.qubits {
                    out.push(Location { layer: lu, kind: lk, qubits: [q as u32, 0] });
                }
            } else if kind.is_two_qubit() {
                out.push(Location {
                    layer: lu,
                    kind: LocationKind::Gate2,
                    qubits: [gate.qubits[0] as u32, gate.qubits[1] as u32],
                });
            } else {
                out.push(Location { layer: lu, kind: LocationKind::Gate1, qubits: [gate.qubits[0] as u32, 0] });
            }
        }
        for q in 0..n {
            if !touched[q] && liveness.live_at(q, l) {
                out.push(Location { layer: lu, kind: LocationKind::Idle, qubits: [q as u32, 0] });
            }
        }
    }
    out
}

/// Marks a CC slot after every layer. Idempotent.
pub fn insert_cc_layers(c: &LayeredCircuit) -> LayeredCircuit {
    let mut out = c.clone();
    out.cc_enabled = true;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn empty_circuit_is_valid() {
        let c = LayeredCircuit::with_counts(0, 0);
        assert!(c.validate().is_ok());
        assert_eq!(insert_cc_layers(&c).cc_slot_count(), 0);
    }

    #[test]
    fn overlap_is_reported_with_layer_and_qubit() {
        let mut c = LayeredCircuit::with_counts(3, 0);
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 0, 1), Gate::two(GateKind::CZ, 1, 2)]));
        let d = c.validate().unwrap_err();
        assert_eq!(d, [Diagnostic { layer: 0, qubit: Some(1), kind: DiagnosticKind::Overlap }]);
    }

    #[test]
    fn duplicate_and_lifetime_errors() {
        let mut c = LayeredCircuit::with_counts(1, 2);
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 0, 0)]));
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 1, 0)]));
        c.push_layer(Layer::new(vec![Gate::new(GateKind::MeasX, [0])]));
        c.push_layer(Layer::new(vec![Gate::new(GateKind::PauliX, [0])]));
        let kinds: Vec<DiagnosticKind> = c.validate().unwrap_err().into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::DuplicateQubit));
        assert!(kinds.contains(&DiagnosticKind::UseBeforePreparation));
        assert!(kinds.contains(&DiagnosticKind::UseAfterMeasurement));
    }

    #[test]
    fn location_counts() {
        let mut c = LayeredCircuit::with_counts(3, 0);
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 0, 1)]));
        let locs = enumerate_locations(&c);
        assert_eq!(locs.len(), 2);
        assert_eq!(locs[0].kind, LocationKind::Gate2);
        assert_eq!(locs[1], Location { layer: 0, kind: LocationKind::Idle, qubits: [2, 0] });

        let mut cat = LayeredCircuit::with_counts(0, 4);
        cat.push_layer(Layer::new(vec![Gate::new(GateKind::PrepCat(2), [0, 1, 2, 3])]));
        cat.push_layer(Layer::new(vec![Gate::new(GateKind::MeasX, [0, 1, 2, 3])]));
        let locs = enumerate_locations(&cat);
        assert_eq!(locs.iter().filter(|l| l.kind == LocationKind::Prep).count(), 4);
        assert_eq!(locs.iter().filter(|l| l.kind == LocationKind::Meas).count(), 4);
        assert_eq!(locs.len(), 8);
    }

    #[test]
    fn ancillas_idle_only_while_live() {
        let mut c = LayeredCircuit::with_counts(1, 2);
        c.push_layer(Layer::default());
        c.push_layer(Layer::new(vec![Gate::new(GateKind::PrepCat(1), [1, 2])]));
        c.push_layer(Layer::default());
        c.push_layer(Layer::new(vec![Gate::new(GateKind::MeasX, [1, 2])]));
        c.push_layer(Layer::default());
        let idle: Vec<(u32, u32)> = enumerate_locations(&c)
            .into_iter()
            .filter(|l| l.kind == LocationKind::Idle)
            .map(|l| (l.layer, l.qubits[0]))
            .collect();
        assert_eq!(idle, [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (3, 0), (4, 0)]);
        let live = c.liveness();
        assert_eq!(c.cc_live_mask(3, &live).to_string(), "111");
        assert_eq!(c.cc_live_mask(4, &live).to_string(), "100");
    }

    #[test]
    fn cc_insertion_is_idempotent() {
        let mut c = LayeredCircuit::with_counts(2, 0);
        c.push_layer(Layer::new(vec![Gate::two(GateKind::CX, 0, 1)]));
        c.push_layer(Layer::new(vec![Gate::new(GateKind::MeasZ, [0, 1])]));
        let once = insert_cc_layers(&c);
        assert_eq!(once.cc_slot_count(), 2);
        assert_eq!(insert_cc_layers(&once), once);
    }
}
