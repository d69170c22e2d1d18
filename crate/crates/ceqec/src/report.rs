//! Lookup-table and fault-tolerance report serialization.

use std::fmt::Write as _;

use ceqec_core::bits::{Bits, Hex};
use ceqec_core::circuit::LocationKind;
use ceqec_core::ftec::{fault_label, FtecReport, Origin, SyndromeTable};
use ceqec_core::pauli::Pauli;

use crate::error::ParseError;
use crate::text::{strip_comment, tokens};

/// One `syndrome(hex) -> pauli` line per entry, in syndrome order.
pub fn serialize_table(t: &SyndromeTable) -> String {
    let mut s = String::new();
    for (syn, e) in t.iter() {
        let _ = writeln!(s, "{} -> {}", Hex(syn), e.correction);
    }
    s
}

/// Inverse of [`Hex`] for a vector of `len` bits.
pub fn parse_hex(text: &str, len: usize) -> Option<Bits> {
    let nibbles = len.div_ceil(4).max(1);
    if text.len() != nibbles {
        return None;
    }
    let mut b = Bits::zeros(len);
    for (k, c) in text.chars().rev().enumerate() {
        let v = c.to_digit(16)?;
        if c.is_ascii_uppercase() {
            return None;
        }
        for j in 0..4 {
            if v >> j & 1 == 1 {
                let i = 4 * k + j;
                if i >= len {
                    return None;
                }
                b.set(i, true);
            }
        }
    }
    Some(b)
}

pub fn parse_table(text: &str, n: usize, n_generators: usize) -> Result<SyndromeTable, ParseError> {
    let mut t = SyndromeTable::new(n, n_generators);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(strip_comment(raw));
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 3 || toks[1].1 != "->" {
            return Err(ParseError::new(line, toks[0].0, "expected `<syndrome hex> -> <pauli>`"));
        }
        let syn = parse_hex(toks[0].1, n_generators)
            .ok_or_else(|| ParseError::new(line, toks[0].0, format!("bad syndrome for {n_generators} generators")))?;
        let p: Pauli = toks[2].1.parse().map_err(|e| ParseError::new(line, toks[2].0, format!("bad Pauli string: {e}")))?;
        if p.len() != n {
            return Err(ParseError::new(line, toks[2].0, format!("correction has length {}, expected {n}", p.len())));
        }
        t.insert(syn, p, Origin::Loaded).map_err(|e| ParseError::new(line, 1, e.to_string()))?;
    }
    Ok(t)
}

fn kind_name(k: LocationKind) -> &'static str {
    match k {
        LocationKind::Prep => "prep",
        LocationKind::Gate1 => "gate1",
        LocationKind::Gate2 => "gate2",
        LocationKind::Idle => "idle",
        LocationKind::Meas => "meas",
    }
}

pub const FTEC_CSV_HEADER: &str = "round,layer,kind,qubits,fault,input,syndrome2,residual,status";

/// One row per record; an empty `input` means a clean input and `*` an
/// arbitrary one.
pub fn ftec_csv(r: &FtecReport) -> String {
    let mut s = String::from(FTEC_CSV_HEADER);
    s.push('\n');
    for rec in &r.records {
        let (layer, kind, qubits) = match &rec.location {
            Some(l) => {
                let q = if l.kind == LocationKind::Gate2 {
                    format!("{} {}", l.qubits[0], l.qubits[1])
                } else {
                    l.qubits[0].to_string()
                };
                (l.layer.to_string(), kind_name(l.kind), q)
            }
            None => (String::new(), "", String::new()),
        };
        let fault = rec.fault.as_ref().map(fault_label).unwrap_or_default();
        let input = match &rec.input {
            Some(p) if p.is_identity_body() => String::new(),
            Some(p) => p.to_string(),
            None => "*".into(),
        };
        let syn = rec.syndrome2.as_ref().map(|b| Hex(b).to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{layer},{kind},{qubits},{fault},{input},{syn},{},{}",
            rec.round,
            rec.residual,
            rec.status.as_str()
        );
    }
    s
}

pub fn ftec_summary(r: &FtecReport) -> String {
    format!(
        "code={} method={} t={} runs={} violations_a={} violations_b={} (input+fault {}) fault_tolerant={}",
        r.code,
        r.method,
        r.t,
        r.runs,
        r.violations_a,
        r.violations_b,
        r.violations_b_with_input,
        r.is_fault_tolerant()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use ceqec_core::code::builtin;
    use ceqec_core::extraction::build_shor_round;
    use ceqec_core::ftec::build_lookup_table;

    #[test]
    fn hex_round_trip() {
        for len in [1, 3, 4, 5, 11, 16] {
            for v in [0u64, 1, 5, (1 << len) - 1] {
                let b = Bits::from_u64(len, v);
                assert_eq!(parse_hex(&Hex(&b).to_string(), len), Some(b));
            }
        }
        assert_eq!(parse_hex("8", 3), None);
        assert_eq!(parse_hex("00", 3), None);
    }

    #[test]
    fn table_round_trip() {
        let code = builtin("c4").unwrap();
        let round = build_shor_round(&code).unwrap();
        let t = build_lookup_table(&code, &round).unwrap();
        let text = serialize_table(&t);
        let back = parse_table(&text, 4, 3).unwrap();
        assert_eq!(serialize_table(&back), text);
        assert_eq!(back.len(), t.len());
        let e = parse_table("0 -> XX\n", 4, 3).unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
    }
}
