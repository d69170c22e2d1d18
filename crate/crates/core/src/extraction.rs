//! Syndrome-extraction rounds compatible with constant-excitation codes.
//!
//! Both builders lay out data qubits `0..n` first and allocate fresh ancilla
//! blocks after them. Syndromes are always reported in generator order of
//! the code, whatever the measurement order in the circuit.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::Bits;
use crate::circuit::{Gate, GateKind, Layer, LayeredCircuit, Role};
use crate::code::CssCode;
use crate::pauli::Pauli;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractionError {
    ZeroWeightCat,
    MixedGenerator { generator: usize },
    NotDualRail { code: String },
    Length { expected: usize, found: usize },
}

impl fmt::Display for ExtractionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroWeightCat => f.write_str("cat state needs w >= 1"),
            Self::MixedGenerator { generator } => {
                write!(f, "generator {generator} is neither pure X nor pure Z")
            }
            Self::NotDualRail { code } => {
                write!(f, "code {code} has no dual-rail pairing; Steane extraction needs one")
            }
            Self::Length { expected, found } => write!(f, "expected {expected} bits, got {found}"),
        }
    }
}

impl core::error::Error for ExtractionError {}

/// `(|01⟩^⊗w + |10⟩^⊗w)/√2` on `2w` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatSpec {
    pub w: usize,
    pub qubits: Vec<usize>,
    /// On `2w` local qubits: `X^⊗2w` and the chain `−Z_i Z_{i+1}`.
    pub stabilizers: Vec<Pauli>,
}

pub fn build_ce_cat(w: usize) -> Result<CatSpec, ExtractionError> {
    build_ce_cat_on((0..2 * w).collect())
}

pub fn build_ce_cat_on(qubits: Vec<usize>) -> Result<CatSpec, ExtractionError> {
    let m = qubits.len();
    if m == 0 || m % 2 != 0 {
        return Err(ExtractionError::ZeroWeightCat);
    }
    let mut stabilizers = vec![Pauli::x_type(Bits::ones(m))];
    for i in 0..m - 1 {
        stabilizers.push(Pauli::z_type(Bits::from_indices(m, [i, i + 1])).negated());
    }
    Ok(CatSpec { w: m / 2, qubits, stabilizers })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Shor,
    Steane,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Shor => "shor",
            Self::Steane => "steane",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliType {
    X,
    Z,
}

/// Whether outcomes are absolute measurement results or flips relative to
/// the fault-free reference run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeMode {
    Absolute,
    Frame,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Parity of the listed ancilla outcomes.
    Parity,
    /// `Σ support_i · m[ancillas[i]]`, with `ancillas` indexed by data position.
    Transversal { support: Bits },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMeasurement {
    pub generator: usize,
    pub pauli_type: PauliType,
    pub sign_negative: bool,
    pub ancillas: Vec<usize>,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionRound {
    pub method: Method,
    pub code_name: String,
    pub n_data: usize,
    pub circuit: LayeredCircuit,
    pub generator_map: Vec<GeneratorMeasurement>,
}

impl ExtractionRound {
    pub fn n_generators(&self) -> usize {
        self.generator_map.len()
    }

    /// Syndrome in generator order from per-qubit outcome bits.
    pub fn syndrome(&self, outcomes: &Bits, mode: OutcomeMode) -> Bits {
        let mut s = Bits::zeros(self.generator_map.len());
        for m in &self.generator_map {
            let raw = match &m.rule {
                Rule::Parity => m.ancillas.iter().filter(|&&q| outcomes.get(q)).count() % 2 == 1,
                Rule::Transversal { support } => {
                    support.ones_iter().filter(|&i| outcomes.get(m.ancillas[i])).count() % 2 == 1
                }
            };
            let bit = match mode {
                OutcomeMode::Absolute => raw ^ m.sign_negative,
                OutcomeMode::Frame => raw,
            };
            s.set(m.generator, bit);
        }
        s
    }

    pub fn ancilla_count(&self) -> usize {
        self.circuit.n_qubits() - self.n_data
    }
}

/// Absolute mode: `wt(a) + c mod 2`. Frame mode: parity of the flips.
pub fn interpret_shor_outcome(a: &Bits, sign_c: bool, mode: OutcomeMode) -> bool {
    let parity = a.count_ones() % 2 == 1;
    match mode {
        OutcomeMode::Absolute => parity ^ sign_c,
        OutcomeMode::Frame => parity,
    }
}

/// X-generator bits from `support·mX`, Z-generator bits from `support·mZ`
/// plus one for negative-sign generators in absolute mode.
pub fn interpret_steane_outcomes(
    mx: &Bits,
    mz: &Bits,
    code: &CssCode,
    mode: OutcomeMode,
) -> Result<Bits, ExtractionError> {
    let n = code.n();
    for v in [mx, mz] {
        if v.len() != n {
            return Err(ExtractionError::Length { expected: n, found: v.len() });
        }
    }
    let gens = code.generators();
    let mut s = Bits::zeros(gens.len());
    for &i in code.x_rows() {
        s.set(i, gens[i].x().dot(mx));
    }
    for &i in code.z_rows() {
        let offset = mode == OutcomeMode::Absolute && gens[i].phase().is_negative();
        s.set(i, gens[i].z().dot(mz) ^ offset);
    }
    Ok(s)
}

/// Placement of the generator gadgets of a Shor round in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShorSchedule {
    /// One generator at a time: a layer preparing a fresh CE cat state, one
    /// layer of controlled gates, and a layer of X measurements.
    #[default]
    Sequential,
    /// Gate layers packed as early as possible subject to disjoint data
    /// supports, with every Z-type gate layer before the first X-type one.
    /// Each cat is prepared in the layer before its gates and measured in
    /// the layer after.
    Packed,
}

impl ShorSchedule {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sequential => "sequential",
            Self::Packed => "packed",
        }
    }
}

/// Shor round with the [`ShorSchedule::Sequential`] schedule, Z-type
/// generators first.
pub fn build_shor_round(code: &CssCode) -> Result<ExtractionRound, ExtractionError> {
    build_shor_round_with(code, ShorSchedule::Sequential)
}

pub fn build_shor_round_with(code: &CssCode, schedule: ShorSchedule) -> Result<ExtractionRound, ExtractionError> {
    let n = code.n();
    let gens = code.generators();
    let order: Vec<usize> = code.z_rows().iter().chain(code.x_rows()).copied().collect();
    let mut ancilla_total = 0;
    for &g in &order {
        ancilla_total += padded(gens[g].weight());
    }
    let mut next = n;
    let mut generator_map = Vec::new();
    // (gate layer, prep gate, controlled gates, measurement gate) per gadget
    let mut gadgets = Vec::new();
    let mut busy: Vec<Bits> = Vec::new();
    let mut block_start = 1;
    let mut last_z = 0;
    for &g in &order {
        let gen = &gens[g];
        let (pauli_type, support) = if gen.is_z_type() {
            (PauliType::Z, gen.z().clone())
        } else if gen.is_x_type() {
            (PauliType::X, gen.x().clone())
        } else {
            return Err(ExtractionError::MixedGenerator { generator: g });
        };
        let size = padded(support.count_ones());
        let ancillas: Vec<usize> = (next..next + size).collect();
        next += size;
        let layer = match schedule {
            ShorSchedule::Sequential => 1 + 3 * gadgets.len(),
            ShorSchedule::Packed => {
                if pauli_type == PauliType::X && block_start <= last_z {
                    block_start = last_z + 1;
                }
                let mut l = block_start;
                while l < busy.len() && busy[l].intersects(&support) {
                    l += 1;
                }
                if busy.len() <= l {
                    busy.resize(l + 1, Bits::zeros(n));
                }
                busy[l].or_assign(&support);
                if pauli_type == PauliType::Z {
                    last_z = last_z.max(l);
                }
                l
            }
        };
        let gates: Vec<Gate> = support
            .ones_iter()
            .zip(&ancillas)
            .enumerate()
            .map(|(j, (d, &a))| {
                let kind = match (pauli_type, j % 2 == 0) {
                    (PauliType::X, true) => GateKind::CX,
                    (PauliType::X, false) => GateKind::C0X,
                    (PauliType::Z, true) => GateKind::CZ,
                    (PauliType::Z, false) => GateKind::C0Z,
                };
                Gate::two(kind, a, d)
            })
            .collect();
        gadgets.push((
            layer,
            Gate::new(GateKind::PrepCat(size / 2), ancillas.clone()),
            gates,
            Gate::new(GateKind::MeasX, ancillas.clone()),
        ));
        generator_map.push(GeneratorMeasurement {
            generator: g,
            pauli_type,
            sign_negative: gen.phase().is_negative(),
            ancillas,
            rule: Rule::Parity,
        });
    }
    let depth = gadgets.iter().map(|g| g.0 + 2).max().unwrap_or(0);
    let mut layers: Vec<Vec<Gate>> = vec![Vec::new(); depth];
    for (l, prep, gates, meas) in gadgets {
        layers[l - 1].push(prep);
        layers[l].extend(gates);
        layers[l + 1].push(meas);
    }
    let mut circuit = LayeredCircuit::with_counts(n, ancilla_total);
    for gates in layers {
        circuit.push_layer(Layer::new(gates));
    }
    Ok(ExtractionRound { method: Method::Shor, code_name: code.name().into(), n_data: n, circuit, generator_map })
}

fn padded(weight: usize) -> usize {
    weight + weight % 2
}

/// Two logical ancilla blocks: `|0…0⟩_L` on `n..2n` (control of a
/// transversal CNOT into the data, then measured in X) and `|+…+⟩_L` on
/// `2n..3n` (target of a transversal CNOT from the data, then measured in
/// Z). The second qubit of each dual-rail pair uses a zero-controlled NOT.
pub fn build_steane_round(code: &CssCode) -> Result<ExtractionRound, ExtractionError> {
    if !code.is_dual_rail() {
        return Err(ExtractionError::NotDualRail { code: code.name().into() });
    }
    let n = code.n();
    let zero_block: Vec<usize> = (n..2 * n).collect();
    let plus_block: Vec<usize> = (2 * n..3 * n).collect();
    let mut roles = vec![Role::Data; n];
    roles.extend(core::iter::repeat_n(Role::Ancilla, 2 * n));
    let mut circuit = LayeredCircuit::new(roles);
    let name = String::from(code.name());
    circuit.push_layer(Layer::new(vec![
        Gate::new(GateKind::PrepLogical0(name.clone()), zero_block.clone()),
        Gate::new(GateKind::PrepLogicalPlus(name), plus_block.clone()),
    ]));
    let kind_for = |i: usize| if i % 2 == 0 { GateKind::CX } else { GateKind::C0X };
    circuit.push_layer(Layer::new((0..n).map(|i| Gate::two(kind_for(i), zero_block[i], i)).collect()));
    circuit.push_layer(Layer::new((0..n).map(|i| Gate::two(kind_for(i), i, plus_block[i])).collect()));
    circuit.push_layer(Layer::new(vec![
        Gate::new(GateKind::MeasX, zero_block.clone()),
        Gate::new(GateKind::MeasZ, plus_block.clone()),
    ]));
    let gens = code.generators();
    let mut generator_map = Vec::new();
    for &g in code.z_rows() {
        generator_map.push(GeneratorMeasurement {
            generator: g,
            pauli_type: PauliType::Z,
            sign_negative: gens[g].phase().is_negative(),
            ancillas: plus_block.clone(),
            rule: Rule::Transversal { support: gens[g].z().clone() },
        });
    }
    for &g in code.x_rows() {
        generator_map.push(GeneratorMeasurement {
            generator: g,
            pauli_type: PauliType::X,
            sign_negative: false,
            ancillas: zero_block.clone(),
            rule: Rule::Transversal { support: gens[g].x().clone() },
        });
    }
    Ok(ExtractionRound { method: Method::Steane, code_name: code.name().into(), n_data: n, circuit, generator_map })
}

pub fn build_round(code: &CssCode, method: Method) -> Result<ExtractionRound, ExtractionError> {
    match method {
        Method::Shor => build_shor_round(code),
        Method::Steane => build_steane_round(code),
    }
}

/// Human-readable summary of a generator measurement, used by sidecar files.
pub fn describe(m: &GeneratorMeasurement) -> String {
    let ty = match m.pauli_type {
        PauliType::X => "X",
        PauliType::Z => "Z",
    };
    let rule = match m.rule {
        Rule::Parity => "parity",
        Rule::Transversal { .. } => "transversal",
    };
    let anc: Vec<String> = m.ancillas.iter().map(|a| format!("{a}")).collect();
    format!(
        "gen {} type={ty} sign={} rule={rule} ancillas={}",
        m.generator,
        if m.sign_negative { "-" } else { "+" },
        anc.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{enumerate_locations, LocationKind};
    use crate::code::builtin;
    use alloc::string::ToString;

    fn b(s: &str) -> Bits {
        Bits::from_bitstring(s).unwrap()
    }

    #[test]
    fn cat_stabilizers() {
        let one = build_ce_cat(1).unwrap();
        assert_eq!(one.stabilizers, ["XX".parse().unwrap(), "-ZZ".parse::<Pauli>().unwrap()]);
        let two = build_ce_cat(2).unwrap();
        let expected: Vec<Pauli> =
            ["XXXX", "-ZZII", "-IZZI", "-IIZZ"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(two.stabilizers, expected);
        assert!(build_ce_cat(0).is_err());
    }

    #[test]
    fn shor_outcome_rule() {
        assert!(!interpret_shor_outcome(&b("0110"), false, OutcomeMode::Absolute));
        assert!(interpret_shor_outcome(&b("0110"), true, OutcomeMode::Absolute));
        assert!(interpret_shor_outcome(&b("1000"), false, OutcomeMode::Absolute));
        assert!(!interpret_shor_outcome(&b("0110"), true, OutcomeMode::Frame));
    }

    #[test]
    fn steane_outcome_rule() {
        let c4 = builtin("c4").unwrap();
        let z = Bits::zeros(4);
        let s = interpret_steane_outcomes(&z, &b("0101"), &c4, OutcomeMode::Absolute).unwrap();
        assert_eq!(s.to_string(), "000");
        let s = interpret_steane_outcomes(&z, &b("0001"), &c4, OutcomeMode::Absolute).unwrap();
        assert_eq!(s.to_string(), "010");
        let s = interpret_steane_outcomes(&z, &z, &c4, OutcomeMode::Frame).unwrap();
        assert!(s.is_zero());
        assert!(interpret_steane_outcomes(&z, &Bits::zeros(3), &c4, OutcomeMode::Frame).is_err());
    }

    #[test]
    fn c4_shor_round_shape() {
        let r = build_shor_round(&builtin("c4").unwrap()).unwrap();
        assert!(r.circuit.validate().is_ok());
        assert_eq!(r.circuit.n_qubits(), 4 + 2 + 2 + 4);
        assert_eq!(r.circuit.depth(), 9);
        let kinds: Vec<PauliType> = r.generator_map.iter().map(|m| m.pauli_type).collect();
        assert_eq!(kinds, [PauliType::Z, PauliType::Z, PauliType::X]);
        let x_layer = &r.circuit.layers()[7];
        let gate_kinds: Vec<&GateKind> = x_layer.gates.iter().map(|g| &g.kind).collect();
        assert_eq!(gate_kinds, [&GateKind::CX, &GateKind::C0X, &GateKind::CX, &GateKind::C0X]);
        let locs = enumerate_locations(&r.circuit);
        let count = |k| locs.iter().filter(|l| l.kind == k).count();
        assert_eq!(count(LocationKind::Prep), 8);
        assert_eq!(count(LocationKind::Gate2), 8);
        assert_eq!(count(LocationKind::Meas), 8);
        // Data idle: 4 per prep/measure layer (6 layers) + 2 in each Z gate layer.
        assert_eq!(count(LocationKind::Idle), 6 * 4 + 2 + 2);
    }

    #[test]
    fn c12_shor_round_has_every_generator() {
        let code = builtin("c12").unwrap();
        let r = build_shor_round(&code).unwrap();
        assert!(r.circuit.validate().is_ok());
        assert_eq!(r.generator_map.len(), 11);
        assert_eq!(r.circuit.depth(), 33);
        assert_eq!(r.ancilla_count(), 4 * 4 + 6 + 6 * 2);
    }

    #[test]
    fn packed_c12_round() {
        let code = builtin("c12").unwrap();
        let r = build_shor_round_with(&code, ShorSchedule::Packed).unwrap();
        assert!(r.circuit.validate().is_ok());
        // weight-6 Z, the six pairs, then two layers of X generators
        assert_eq!(r.circuit.depth(), 6);
        let seq = build_shor_round(&code).unwrap();
        assert_eq!(r.generator_map, seq.generator_map);
    }

    #[test]
    fn steane_round_shape() {
        let code = builtin("c12").unwrap();
        let r = build_steane_round(&code).unwrap();
        assert!(r.circuit.validate().is_ok());
        assert_eq!(r.circuit.depth(), 4);
        assert_eq!(r.circuit.n_qubits(), 36);
        let steane = crate::code::CssCode::from_stabilizer(crate::code::reference::steane()).unwrap();
        assert!(matches!(build_steane_round(&steane), Err(ExtractionError::NotDualRail { .. })));
    }
}
