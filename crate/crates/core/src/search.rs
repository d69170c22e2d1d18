//! Exhaustive searches over small binary linear codes.
//!
//! Vectors of length `n ≤ 16` are `u32` bit masks. Subspaces are enumerated
//! once each through their reduced row echelon generator matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    UnsupportedLength(usize),
    /// MacWilliams transform and direct enumeration disagree.
    MacWilliams { generators: Vec<u32> },
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnsupportedLength(n) => write!(f, "length {n} is not supported (use 8 or 9)"),
            Self::MacWilliams { generators } => {
                write!(f, "MacWilliams identity fails for the code generated by {generators:?}")
            }
        }
    }
}

impl core::error::Error for SearchError {}

/// Calls `f` with the RREF rows of every `k`-dimensional subspace of
/// `F_2^n`. Pivots are the lowest set bit of each row.
pub fn for_each_subspace(n: usize, k: usize, mut f: impl FnMut(&[u32])) {
    let mut pivots = Vec::with_capacity(k);
    subsets(n, k, 0, &mut pivots, &mut |piv| {
        let pivot_mask: u32 = piv.iter().map(|&p| 1u32 << p).sum();
        // free positions of row i: after its pivot and not a pivot
        let free: Vec<Vec<usize>> =
            piv.iter().map(|&p| (p + 1..n).filter(|&c| pivot_mask & (1 << c) == 0).collect()).collect();
        let total: usize = free.iter().map(|v| v.len()).sum();
        let mut rows = vec![0u32; k];
        for bits in 0..(1u64 << total) {
            let mut used = 0;
            for (i, cols) in free.iter().enumerate() {
                let mut r = 1u32 << piv[i];
                for &c in cols {
                    if bits >> used & 1 == 1 {
                        r |= 1 << c;
                    }
                    used += 1;
                }
                rows[i] = r;
            }
            f(&rows);
        }
    });
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Basis of the dual of the space spanned by RREF `rows`.
pub fn dual_basis(n: usize, rows: &[u32]) -> Vec<u32> {
    let pivots: Vec<usize> = rows.iter().map(|r| r.trailing_zeros() as usize).collect();
    let pivot_mask: u32 = pivots.iter().map(|&p| 1u32 << p).sum();
    (0..n)
        .filter(|&c| pivot_mask & (1 << c) == 0)
        .map(|c| {
            let mut v = 1u32 << c;
            for (r, &p) in rows.iter().zip(&pivots) {
                if r >> c & 1 == 1 {
                    v |= 1 << p;
                }
            }
            v
        })
        .collect()
}

/// Calls `f` on every codeword of the span, in Gray-code order.
fn for_each_codeword(basis: &[u32], mut f: impl FnMut(u32) -> bool) {
    let mut w = 0u32;
    if !f(w) {
        return;
    }
    for i in 1u64..(1u64 << basis.len()) {
        w ^= basis[i.trailing_zeros() as usize];
        if !f(w) {
            return;
        }
    }
}

/// Minimum nonzero weight of the span; `None` for the zero space.
pub fn min_distance(basis: &[u32]) -> Option<u32> {
    let mut best: Option<u32> = None;
    for_each_codeword(basis, |w| {
        if w != 0 {
            let c = w.count_ones();
            best = Some(best.map_or(c, |b| b.min(c)));
        }
        best != Some(1)
    });
    best
}

pub fn weight_enumerator(n: usize, basis: &[u32]) -> Vec<u64> {
    let mut a = vec![0u64; n + 1];
    for_each_codeword(basis, |w| {
        a[w.count_ones() as usize] += 1;
        true
    });
    a
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Krawtchouk polynomial `K_j(i)` for length `n`.
pub fn krawtchouk(n: usize, j: usize, i: usize) -> i64 {
    let (n, j, i) = (n as i64, j as i64, i as i64);
    (0..=j).map(|s| if s % 2 == 0 { 1 } else { -1 } * binomial(i, s) * binomial(n - i, j - s)).sum()
}

/// Dual weight enumerator by the MacWilliams transform, or `None` if a
/// coefficient is not an integer.
pub fn macwilliams(n: usize, a: &[u64]) -> Option<Vec<u64>> {
    let size: u64 = a.iter().sum();
    (0..=n)
        .map(|j| {
            let s: i64 = a.iter().enumerate().map(|(i, &ai)| ai as i64 * krawtchouk(n, j, i)).sum();
            (s >= 0 && s % size as i64 == 0).then(|| s as u64 / size)
        })
        .collect()
}

fn check_macwilliams(n: usize, rows: &[u32]) -> Result<(), SearchError> {
    let direct = weight_enumerator(n, &dual_basis(n, rows));
    match macwilliams(n, &weight_enumerator(n, rows)) {
        Some(b) if b == direct => Ok(()),
        _ => Err(SearchError::MacWilliams { generators: rows.to_vec() }),
    }
}

pub fn format_vector(n: usize, v: u32) -> String {
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma3Constraints {
    pub n: usize,
    pub max_dim: usize,
    /// Require every codeword of `C₂` to have even weight.
    pub even_weight: bool,
    pub min_dual_distance: u32,
    /// Smallest allowed dimension of the dual.
    pub min_dual_dim: usize,
}

impl Default for Lemma3Constraints {
    fn default() -> Self {
        Self { n: 5, max_dim: 3, even_weight: true, min_dual_distance: 3, min_dual_dim: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub n: usize,
    pub generators: Vec<u32>,
    pub dual_generators: Vec<u32>,
    pub dual_distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub title: String,
    pub exists: bool,
    pub certificate: Option<Certificate>,
    pub examined: u64,
    pub macwilliams_checked: u64,
    pub lines: Vec<String>,
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        writeln!(f, "codes examined: {}", self.examined)?;
        writeln!(f, "MacWilliams checks passed: {}", self.macwilliams_checked)?;
        if let Some(c) = &self.certificate {
            let g: Vec<String> = c.generators.iter().map(|&v| format_vector(c.n, v)).collect();
            let d: Vec<String> = c.dual_generators.iter().map(|&v| format_vector(c.n, v)).collect();
            writeln!(f, "certificate: C2 = <{}>, dual = <{}>, dual distance {}", g.join(" "), d.join(" "), c.dual_distance)?;
        }
        write!(f, "RESULT: exists={}", self.exists)
    }
}

/// Searches for an even-weight `C₂` of length 5 whose dual is a `[5,≥2,≥3]`
/// code.
pub fn lemma3_search() -> Result<SearchReport, SearchError> {
    lemma3_search_with(Lemma3Constraints::default())
}

pub fn lemma3_search_with(c: Lemma3Constraints) -> Result<SearchReport, SearchError> {
    let n = c.n;
    let mut examined = 0u64;
    let mut checked = 0u64;
    let mut certificate = None;
    let mut error = None;
    for k in 0..=c.max_dim.min(n) {
        for_each_subspace(n, k, |rows| {
            if error.is_some() {
                return;
            }
            if c.even_weight && rows.iter().any(|r| r.count_ones() % 2 == 1) {
                return;
            }
            examined += 1;
            if let Err(e) = check_macwilliams(n, rows) {
                error = Some(e);
                return;
            }
            checked += 1;
            let dual = dual_basis(n, rows);
            if dual.len() < c.min_dual_dim || certificate.is_some() {
                return;
            }
            // the zero space has no nonzero word; the full space has distance 1
            let d = min_distance(&dual).unwrap_or(0);
            if d >= c.min_dual_distance {
                certificate =
                    Some(Certificate { n, generators: rows.to_vec(), dual_generators: dual, dual_distance: d });
            }
        });
    }
    if let Some(e) = error {
        return Err(e);
    }
    let lines = vec![
        format!(
            "C2: binary linear codes of length {n}, dimension <= {}{}",
            c.max_dim,
            if c.even_weight { ", all codewords of even weight" } else { "" }
        ),
        format!("target: dual of dimension >= {} and minimum distance >= {}", c.min_dual_dim, c.min_dual_distance),
    ];
    Ok(SearchReport {
        title: String::from("[[10,1,3]] CE CSS via dual-rail lift of a [[5,1]] CSS code"),
        exists: certificate.is_some(),
        certificate,
        examined,
        macwilliams_checked: checked,
        lines,
    })
}

/// Upper bounds on constant-weight codes with distance 4, cited rather than
/// recomputed.
pub fn cited_constant_weight_bound(n: usize) -> Option<u32> {
    match n {
        8 => Some(14),
        9 => Some(18),
        _ => None,
    }
}

/// Largest minimum distance among all `[n, n − r]` codes, over every
/// `r`-dimensional parity-check space. Two independent tests are applied to
/// each code: codeword enumeration and the distinct-nonzero-columns
/// criterion for distance 3.
pub fn best_distance_with_redundancy(n: usize, r: usize) -> (u32, u64) {
    let mut best = 0;
    let mut count = 0u64;
    for_each_subspace(n, r, |rows| {
        count += 1;
        let code = dual_basis(n, rows);
        let d = min_distance(&code).unwrap_or(u32::MAX);
        let columns: Vec<u32> =
            (0..n).map(|c| rows.iter().enumerate().map(|(i, row)| (row >> c & 1) << i).sum()).collect();
        let distinct_nonzero = columns.iter().all(|&x| x != 0)
            && (0..n).all(|i| (i + 1..n).all(|j| columns[i] != columns[j]));
        assert_eq!(d >= 3, distinct_nonzero, "distance tests disagree on {rows:?}");
        best = best.max(d);
    });
    (best, count)
}

/// Decisive linear-code step of the argument that no `[[n,1,3]]` CE CSS
/// code exists for `n ∈ {8, 9}`.
pub fn lemma2_check(n: usize) -> Result<SearchReport, SearchError> {
    let bound = cited_constant_weight_bound(n).ok_or(SearchError::UnsupportedLength(n))?;
    // |W| = 2|C2| ≤ A(n,4,w), and |C2| is a power of two
    let max_c2 = {
        let half = bound / 2;
        1u32 << (31 - half.leading_zeros())
    };
    let r_max = max_c2.trailing_zeros() as usize;
    let mut lines = vec![
        format!("A({n},4,w) <= {bound} for every w (cited constant)"),
        format!("|W| = 2|C2| <= {bound}, so |C2| <= {}; C2 linear gives |C2| <= {max_c2}", bound / 2),
        format!("dual of C2 has dimension >= {} ({} codewords)", n - r_max, 1u32 << (n - r_max)),
    ];
    let mut examined = 0;
    let mut best_overall = 0;
    for r in 0..=r_max {
        let (best, count) = best_distance_with_redundancy(n, r);
        let best = if best == u32::MAX { 0 } else { best };
        lines.push(format!("[{n},{}] codes: {count} examined, best minimum distance {best}", n - r));
        examined += count;
        best_overall = best_overall.max(best);
    }
    let mut checked = 0;
    if n == 8 {
        for r in 0..=r_max {
            let mut err = None;
            for_each_subspace(n, r, |rows| {
                if err.is_none() {
                    match check_macwilliams(n, rows) {
                        Ok(()) => checked += 1,
                        Err(e) => err = Some(e),
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    let exists = best_overall >= 3;
    lines.push(format!(
        "every [{n},>={}] code has minimum distance <= 2: {}",
        n - r_max,
        if exists { "no" } else { "yes" }
    ));
    Ok(SearchReport {
        title: format!("[[{n},1,3]] CE CSS code: linear-code step"),
        exists,
        certificate: None,
        examined,
        macwilliams_checked: checked,
        lines,
    })
}
