//! Code lookup by name or file.

use std::path::Path;

use ceqec_core::code::{builtin_stabilizer, reference, CodeError, CssCode, StabilizerCode, BUILTIN_NAMES};

use crate::codefile::parse_code;
use crate::error::{Error, Result};

/// Textbook codes reachable from the command line besides the built-ins.
pub const REFERENCE_NAMES: [&str; 4] = ["steane", "six", "five", "bell"];

/// Resolves a built-in name, a reference code, or a path to a code file.
pub fn resolve(name: &str) -> Result<StabilizerCode> {
    if BUILTIN_NAMES.contains(&name) {
        return Ok(builtin_stabilizer(name)?);
    }
    match name {
        "steane" => return Ok(reference::steane()),
        "six" => return Ok(reference::six_qubit()),
        "five" => return Ok(reference::five_qubit()),
        "bell" => return Ok(reference::bell_pair()),
        _ => {}
    }
    let path = Path::new(name);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return parse_code(&text).map_err(|source| Error::File { path: path.into(), source });
    }
    Err(CodeError::UnknownCode { name: name.to_string() }.into())
}

pub fn resolve_css(name: &str) -> Result<CssCode> {
    Ok(CssCode::from_stabilizer(resolve(name)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        for n in BUILTIN_NAMES.iter().chain(&REFERENCE_NAMES) {
            assert!(resolve(n).is_ok(), "{n}");
        }
        assert!(matches!(resolve("c99"), Err(Error::Code(CodeError::UnknownCode { .. }))));
        assert!(resolve_css("c10").is_err());
    }
}
