//! Circuit text format `ceqc v1`.
//!
//! ```text
//! ceqc v1
//! qubits 8
//! data 0..3
//! ancilla 4..7
//! layer: prep cat_ce(2) 4 5 6 7
//! layer: CX 4 0 ; C0X 5 1 ; CX 6 2 ; C0X 7 3
//! layer: MX 4 5 6 7
//! ```
//!
//! Ranges are inclusive. `cc on` marks CC slots after every layer. An
//! extraction round adds `meta:` lines describing how outcomes map to
//! syndrome bits.

use std::fmt::Write as _;

use ceqec_core::bits::Bits;
use ceqec_core::circuit::{Gate, GateKind, Layer, LayeredCircuit, Role};
use ceqec_core::extraction::{ExtractionRound, GeneratorMeasurement, Method, PauliType, Rule};

use crate::error::ParseError;
use crate::text::{parse_usize, strip_comment, tokens};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundMeta {
    pub method: Method,
    pub code_name: String,
    pub n_data: usize,
    pub generator_map: Vec<GeneratorMeasurement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitFile {
    pub circuit: LayeredCircuit,
    pub meta: Option<RoundMeta>,
}

impl CircuitFile {
    pub fn from_round(round: &ExtractionRound) -> Self {
        Self {
            circuit: round.circuit.clone(),
            meta: Some(RoundMeta {
                method: round.method,
                code_name: round.code_name.clone(),
                n_data: round.n_data,
                generator_map: round.generator_map.clone(),
            }),
        }
    }

    pub fn into_round(self) -> Option<ExtractionRound> {
        let meta = self.meta?;
        Some(ExtractionRound {
            method: meta.method,
            code_name: meta.code_name,
            n_data: meta.n_data,
            circuit: self.circuit,
            generator_map: meta.generator_map,
        })
    }
}

fn gate_text(g: &Gate) -> String {
    let head = match &g.kind {
        GateKind::PrepCat(w) => format!("prep cat_ce({w})"),
        GateKind::PrepLogical0(c) => format!("prep logical0 {c}"),
        GateKind::PrepLogicalPlus(c) => format!("prep logicalplus {c}"),
        GateKind::CX => "CX".into(),
        GateKind::C0X => "C0X".into(),
        GateKind::CZ => "CZ".into(),
        GateKind::C0Z => "C0Z".into(),
        GateKind::PauliX => "X".into(),
        GateKind::PauliZ => "Z".into(),
        GateKind::MeasX => "MX".into(),
        GateKind::MeasZ => "MZ".into(),
    };
    let qs: Vec<String> = g.qubits.iter().map(|q| q.to_string()).collect();
    format!("{head} {}", qs.join(" "))
}

fn role_runs(roles: &[Role]) -> Vec<(Role, usize, usize)> {
    let mut runs: Vec<(Role, usize, usize)> = Vec::new();
    for (q, &r) in roles.iter().enumerate() {
        match runs.last_mut() {
            Some(last) if last.0 == r && last.2 + 1 == q => last.2 = q,
            _ => runs.push((r, q, q)),
        }
    }
    runs
}

pub fn serialize_circuit(f: &CircuitFile) -> String {
    let c = &f.circuit;
    let mut s = String::from("ceqc v1\n");
    let _ = writeln!(s, "qubits {}", c.n_qubits());
    for (role, a, b) in role_runs(c.roles()) {
        let word = if role == Role::Data { "data" } else { "ancilla" };
        let _ = writeln!(s, "{word} {a}..{b}");
    }
    if c.cc_enabled() {
        s.push_str("cc on\n");
    }
    for layer in c.layers() {
        let gates: Vec<String> = layer.gates.iter().map(gate_text).collect();
        if gates.is_empty() {
            s.push_str("layer:\n");
        } else {
            let _ = writeln!(s, "layer: {}", gates.join(" ; "));
        }
    }
    if let Some(m) = &f.meta {
        let _ = writeln!(s, "meta: round {} {} {}", m.method.as_str(), m.code_name, m.n_data);
        for g in &m.generator_map {
            let t = if g.pauli_type == PauliType::X { "X" } else { "Z" };
            let sign = if g.sign_negative { "-" } else { "+" };
            let rule = match &g.rule {
                Rule::Parity => "parity".to_string(),
                Rule::Transversal { support } => format!("transversal {support}"),
            };
            let qs: Vec<String> = g.ancillas.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(s, "meta: gen {} {t} {sign} {rule} {}", g.generator, qs.join(" "));
        }
    }
    s
}

pub fn serialize_round(round: &ExtractionRound) -> String {
    serialize_circuit(&CircuitFile::from_round(round))
}

fn parse_range(line: usize, col: usize, t: &str) -> Result<(usize, usize), ParseError> {
    let (a, b) = t.split_once("..").ok_or_else(|| ParseError::new(line, col, format!("expected `i..j`, found `{t}`")))?;
    let a = parse_usize(line, col, a)?;
    let b = parse_usize(line, col + t.find("..").unwrap_or(0) + 2, b)?;
    if b < a {
        return Err(ParseError::new(line, col, format!("empty range `{t}`")));
    }
    Ok((a, b))
}

/// Parses one gate from tokens that start at its mnemonic.
fn parse_gate(line: usize, toks: &[(usize, &str)]) -> Result<Gate, ParseError> {
    let (col, word) = toks[0];
    let (kind, rest) = match word {
        "CX" => (GateKind::CX, &toks[1..]),
        "C0X" => (GateKind::C0X, &toks[1..]),
        "CZ" => (GateKind::CZ, &toks[1..]),
        "C0Z" => (GateKind::C0Z, &toks[1..]),
        "X" => (GateKind::PauliX, &toks[1..]),
        "Z" => (GateKind::PauliZ, &toks[1..]),
        "MX" => (GateKind::MeasX, &toks[1..]),
        "MZ" => (GateKind::MeasZ, &toks[1..]),
        "prep" => {
            let &(c2, what) = toks.get(1).ok_or_else(|| ParseError::new(line, col, "`prep` needs a state"))?;
            if let Some(w) = what.strip_prefix("cat_ce(").and_then(|s| s.strip_suffix(')')) {
                (GateKind::PrepCat(parse_usize(line, c2 + 7, w)?), &toks[2..])
            } else if what == "logical0" || what == "logicalplus" {
                let &(_, code) = toks.get(2).ok_or_else(|| ParseError::new(line, c2, "missing code name"))?;
                let kind = if what == "logical0" {
                    GateKind::PrepLogical0(code.to_string())
                } else {
                    GateKind::PrepLogicalPlus(code.to_string())
                };
                (kind, &toks[3..])
            } else {
                return Err(ParseError::new(line, c2, format!("unknown preparation `{what}`")));
            }
        }
        _ => return Err(ParseError::new(line, col, format!("unknown gate `{word}`"))),
    };
    let qubits = rest.iter().map(|&(c, t)| parse_usize(line, c, t)).collect::<Result<Vec<_>, _>>()?;
    Ok(Gate::new(kind, qubits))
}

fn parse_meta(line: usize, toks: &[(usize, &str)], meta: &mut Option<RoundMeta>) -> Result<(), ParseError> {
    let bad = |c: usize, m: &str| ParseError::new(line, c, m.to_string());
    let &(col, word) = toks.first().ok_or_else(|| bad(1, "empty meta line"))?;
    match word {
        "round" => {
            if toks.len() != 4 {
                return Err(bad(col, "expected `meta: round <method> <code> <n_data>`"));
            }
            let method = match toks[1].1 {
                "shor" => Method::Shor,
                "steane" => Method::Steane,
                other => return Err(bad(toks[1].0, &format!("unknown method `{other}`"))),
            };
            let n_data = parse_usize(line, toks[3].0, toks[3].1)?;
            *meta = Some(RoundMeta { method, code_name: toks[2].1.to_string(), n_data, generator_map: Vec::new() });
            Ok(())
        }
        "gen" => {
            let m = meta.as_mut().ok_or_else(|| bad(col, "`meta: gen` before `meta: round`"))?;
            if toks.len() < 5 {
                return Err(bad(col, "expected `meta: gen <index> <X|Z> <+|-> <rule> <ancillas>`"));
            }
            let generator = parse_usize(line, toks[1].0, toks[1].1)?;
            let pauli_type = match toks[2].1 {
                "X" => PauliType::X,
                "Z" => PauliType::Z,
                _ => return Err(bad(toks[2].0, "expected X or Z")),
            };
            let sign_negative = match toks[3].1 {
                "+" => false,
                "-" => true,
                _ => return Err(bad(toks[3].0, "expected + or -")),
            };
            let (rule, rest) = match toks[4].1 {
                "parity" => (Rule::Parity, &toks[5..]),
                "transversal" => {
                    let &(c, s) = toks.get(5).ok_or_else(|| bad(toks[4].0, "missing support"))?;
                    let support = Bits::from_bitstring(s).ok_or_else(|| bad(c, "support must be a 0/1 string"))?;
                    (Rule::Transversal { support }, &toks[6..])
                }
                other => return Err(bad(toks[4].0, &format!("unknown rule `{other}`"))),
            };
            let ancillas = rest.iter().map(|&(c, t)| parse_usize(line, c, t)).collect::<Result<Vec<_>, _>>()?;
            m.generator_map.push(GeneratorMeasurement { generator, pauli_type, sign_negative, ancillas, rule });
            Ok(())
        }
        other => Err(bad(col, &format!("unknown meta entry `{other}`"))),
    }
}

/// Parses and validates a circuit file.
pub fn parse_circuit(text: &str) -> Result<CircuitFile, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l))).filter(|(_, l)| !l.trim().is_empty());
    let (line, first) = lines.next().ok_or_else(|| ParseError::new(1, 1, "empty circuit file"))?;
    if first.trim() != "ceqc v1" {
        return Err(ParseError::new(line, 1, "expected header `ceqc v1`"));
    }
    let mut n: Option<usize> = None;
    let mut roles: Vec<Option<Role>> = Vec::new();
    let mut cc = false;
    let mut layers: Vec<(usize, Layer)> = Vec::new();
    let mut meta = None;
    for (line, body) in lines {
        if let Some(rest) = body.trim_start().strip_prefix("layer:") {
            let offset = body.len() - rest.len();
            let mut gates = Vec::new();
            let mut start = 0;
            for piece in rest.split(';') {
                let toks: Vec<(usize, &str)> =
                    tokens(piece).into_iter().map(|(c, t)| (c + offset + start, t)).collect();
                start += piece.chars().count() + 1;
                if toks.is_empty() {
                    if rest.trim().is_empty() {
                        continue;
                    }
                    return Err(ParseError::new(line, offset + start, "empty gate"));
                }
                gates.push(parse_gate(line, &toks)?);
            }
            layers.push((line, Layer::new(gates)));
            continue;
        }
        if let Some(rest) = body.trim_start().strip_prefix("meta:") {
            let offset = body.len() - rest.len();
            let toks: Vec<(usize, &str)> = tokens(rest).into_iter().map(|(c, t)| (c + offset, t)).collect();
            parse_meta(line, &toks, &mut meta)?;
            continue;
        }
        let toks = tokens(body);
        let (col, word) = toks[0];
        if !layers.is_empty() {
            return Err(ParseError::new(line, col, format!("`{word}` after the first layer")));
        }
        match (word, toks.len()) {
            ("qubits", 2) => {
                let count = parse_usize(line, toks[1].0, toks[1].1)?;
                n = Some(count);
                roles = vec![None; count];
            }
            ("data" | "ancilla", 2) => {
                let count = n.ok_or_else(|| ParseError::new(line, col, "`qubits` must come first"))?;
                let (a, b) = parse_range(line, toks[1].0, toks[1].1)?;
                if b >= count {
                    return Err(ParseError::new(line, toks[1].0, format!("qubit {b} out of range")));
                }
                let role = if word == "data" { Role::Data } else { Role::Ancilla };
                for slot in &mut roles[a..=b] {
                    if slot.is_some() {
                        return Err(ParseError::new(line, toks[1].0, "qubit assigned twice"));
                    }
                    *slot = Some(role);
                }
            }
            ("cc", 2) => match toks[1].1 {
                "on" => cc = true,
                "off" => cc = false,
                other => return Err(ParseError::new(line, toks[1].0, format!("expected on/off, found `{other}`"))),
            },
            _ => return Err(ParseError::new(line, col, format!("unexpected line starting with `{word}`"))),
        }
    }
    let n = n.ok_or_else(|| ParseError::new(line, 1, "missing `qubits` line"))?;
    if let Some(q) = roles.iter().position(Option::is_none) {
        return Err(ParseError::new(line, 1, format!("qubit {q} has no role")));
    }
    let mut circuit = LayeredCircuit::new(roles.into_iter().flatten().collect());
    debug_assert_eq!(circuit.n_qubits(), n);
    circuit.set_cc_enabled(cc);
    let layer_lines: Vec<usize> = layers.iter().map(|(l, _)| *l).collect();
    for (_, layer) in layers {
        circuit.push_layer(layer);
    }
    if let Err(diags) = circuit.validate() {
        let d = &diags[0];
        return Err(ParseError::new(layer_lines[d.layer], 1, d.to_string()));
    }
    Ok(CircuitFile { circuit, meta })
}
