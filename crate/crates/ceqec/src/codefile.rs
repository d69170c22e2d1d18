//! Code files.
//!
//! ```text
//! code c4 n=4 k=1
//! +XXXX
//! -ZZII
//! -IIZZ
//! logicalX:
//! +XXII
//! logicalZ:
//! +IZZI
//! ```

use std::fmt::Write as _;

use ceqec_core::code::StabilizerCode;
use ceqec_core::pauli::{Pauli, Phase};

use crate::error::ParseError;
use crate::text::{strip_comment, tokens};

fn signed(p: &Pauli) -> String {
    if p.phase() == Phase::PlusOne {
        format!("+{p}")
    } else {
        p.to_string()
    }
}

pub fn serialize_code(code: &StabilizerCode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "code {} n={} k={}", code.name(), code.n(), code.k());
    for g in code.generators() {
        let _ = writeln!(s, "{}", signed(g));
    }
    s.push_str("logicalX:\n");
    for l in code.logical_x() {
        let _ = writeln!(s, "{}", signed(l));
    }
    s.push_str("logicalZ:\n");
    for l in code.logical_z() {
        let _ = writeln!(s, "{}", signed(l));
    }
    s
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Generators,
    LogicalX,
    LogicalZ,
}

fn header_value(line: usize, col: usize, tok: &str, key: &str) -> Result<usize, ParseError> {
    tok.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| ParseError::new(line, col, format!("expected `{key}=<integer>`, found `{tok}`")))
}

pub fn parse_code(text: &str) -> Result<StabilizerCode, ParseError> {
    let mut header: Option<(usize, String, usize, usize)> = None;
    let mut section = Section::Generators;
    let mut lists: [Vec<Pauli>; 3] = Default::default();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokens(strip_comment(raw));
        let Some(&(col, first)) = toks.first() else { continue };
        if header.is_none() {
            if first != "code" || toks.len() != 4 {
                return Err(ParseError::new(line, col, "expected `code <name> n=<n> k=<k>`"));
            }
            let n = header_value(line, toks[2].0, toks[2].1, "n")?;
            let k = header_value(line, toks[3].0, toks[3].1, "k")?;
            header = Some((line, toks[1].1.to_string(), n, k));
            continue;
        }
        if toks.len() != 1 {
            return Err(ParseError::new(line, toks[1].0, "one operator per line"));
        }
        section = match first {
            "logicalX:" => Section::LogicalX,
            "logicalZ:" => Section::LogicalZ,
            _ => {
                let p: Pauli =
                    first.parse().map_err(|e| ParseError::new(line, col, format!("bad Pauli string: {e}")))?;
                let n = header.as_ref().map_or(0, |h| h.2);
                if p.len() != n {
                    return Err(ParseError::new(line, col, format!("operator has length {}, expected {n}", p.len())));
                }
                lists[section as usize].push(p);
                continue;
            }
        };
    }
    let (hline, name, n, k) = header.ok_or_else(|| ParseError::new(last_line.max(1), 1, "missing `code` header"))?;
    let [gens, lx, lz] = lists;
    if gens.len() + k != n {
        return Err(ParseError::new(hline, 1, format!("{} generators do not give k={k} for n={n}", gens.len())));
    }
    StabilizerCode::new(name, gens, lx, lz).map_err(|e| ParseError::new(hline, 1, e.to_string()))
}
