//! Small helpers shared by the line-oriented text formats.

use crate::error::ParseError;

/// Whitespace-separated tokens with their 1-based column.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

/// Drops a trailing `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

pub(crate) fn parse_usize(line: usize, column: usize, t: &str) -> Result<usize, ParseError> {
    t.parse().map_err(|_| ParseError::new(line, column, format!("expected a non-negative integer, found `{t}`")))
}
