//! Linear algebra over GF(2) on packed bit vectors.

use alloc::vec::Vec;

use crate::bits::Bits;

/// Incrementally built row basis that remembers how each reduced row was
/// formed from the inserted vectors.
///
/// Rows are kept fully reduced against each other's pivots, so
/// [`Basis::reduce`] needs a single pass.
#[derive(Debug, Clone)]
pub struct Basis {
    width: usize,
    inserted: usize,
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
struct Row {
    pivot: usize,
    vec: Bits,
    combo: Vec<usize>,
}

impl Basis {
    pub fn new(width: usize) -> Self {
        Self { width, inserted: 0, rows: Vec::new() }
    }

    pub fn from_rows<'a>(width: usize, rows: impl IntoIterator<Item = &'a Bits>) -> Self {
        let mut b = Self::new(width);
        for r in rows {
            b.insert(r);
        }
        b
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors offered to [`Basis::insert`], dependent ones included.
    #[inline]
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Adds `v` as input number `self.inserted()`. Returns whether it was
    /// independent of the previous inputs.
    pub fn insert(&mut self, v: &Bits) -> bool {
        assert_eq!(v.len(), self.width);
        let label = self.inserted;
        self.inserted += 1;
        let (mut residual, mut combo) = self.reduce_with_combo(v);
        let Some(pivot) = residual.ones_iter().next() else {
            return false;
        };
        toggle_label(&mut combo, label);
        for row in self.rows.iter_mut() {
            if row.vec.get(pivot) {
                row.vec ^= &residual;
                for &l in &combo {
                    toggle_label(&mut row.combo, l);
                }
            }
        }
        residual.set(pivot, true);
        self.rows.push(Row { pivot, vec: residual, combo });
        true
    }

    /// Residual of `v` after elimination; zero iff `v` is in the span.
    pub fn reduce(&self, v: &Bits) -> Bits {
        let mut r = v.clone();
        for row in &self.rows {
            if r.get(row.pivot) {
                r ^= &row.vec;
            }
        }
        r
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).is_zero()
    }

    /// Indices of inserted vectors whose sum equals `v`, if `v` is in the span.
    pub fn solve(&self, v: &Bits) -> Option<Vec<usize>> {
        let (r, mut combo) = self.reduce_with_combo(v);
        if r.is_zero() {
            combo.sort_unstable();
            Some(combo)
        } else {
            None
        }
    }

    fn reduce_with_combo(&self, v: &Bits) -> (Bits, Vec<usize>) {
        let mut r = v.clone();
        let mut combo = Vec::new();
        for row in &self.rows {
            if r.get(row.pivot) {
                r ^= &row.vec;
                for &l in &row.combo {
                    toggle_label(&mut combo, l);
                }
            }
        }
        (r, combo)
    }

    /// Current reduced rows.
    pub fn rows(&self) -> impl Iterator<Item = &Bits> {
        self.rows.iter().map(|r| &r.vec)
    }
}

fn toggle_label(combo: &mut Vec<usize>, l: usize) {
    if let Some(pos) = combo.iter().position(|&x| x == l) {
        combo.swap_remove(pos);
    } else {
        combo.push(l);
    }
}

pub fn rank(rows: &[Bits]) -> usize {
    let width = rows.first().map_or(0, Bits::len);
    Basis::from_rows(width, rows).rank()
}

/// Reduced row echelon form with pivots in increasing column order.
pub fn rref(rows: &[Bits], width: usize) -> Vec<Bits> {
    let mut m: Vec<Bits> = rows.to_vec();
    let mut out_rank = 0;
    for col in 0..width {
        let Some(found) = (out_rank..m.len()).find(|&i| m[i].get(col)) else {
            continue;
        };
        m.swap(out_rank, found);
        let pivot_row = m[out_rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != out_rank && row.get(col) {
                *row ^= &pivot_row;
            }
        }
        out_rank += 1;
    }
    m.truncate(out_rank);
    m
}

/// Basis of `{v : r·v = 0 for every row r}`.
pub fn nullspace(rows: &[Bits], width: usize) -> Vec<Bits> {
    let reduced = rref(rows, width);
    let pivots: Vec<usize> = reduced.iter().map(|r| r.ones_iter().next().unwrap()).collect();
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivots.contains(c)) {
        let mut v = Bits::zeros(width);
        v.set(free, true);
        for (row, &p) in reduced.iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Some `x` with `r_i · x = rhs_i` for every row, if the system is consistent.
pub fn solve_dot_system(rows: &[Bits], rhs: &[bool], width: usize) -> Option<Bits> {
    assert_eq!(rows.len(), rhs.len());
    // Augment each row with its right-hand side as an extra column.
    let aug: Vec<Bits> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut a = r.resized(width + 1);
            a.set(width, b);
            a
        })
        .collect();
    let reduced = rref(&aug, width + 1);
    let mut x = Bits::zeros(width);
    for row in &reduced {
        let pivot = row.ones_iter().next().unwrap();
        if pivot == width {
            return None;
        }
        x.set(pivot, row.get(width));
    }
    Some(x)
}

/// All `2^k` elements of the span of `basis`, in Gray-code order starting at zero.
pub fn span(basis: &[Bits], width: usize) -> SpanIter<'_> {
    SpanIter { basis, current: Bits::zeros(width), step: 0, total: 1u64 << basis.len() }
}

pub struct SpanIter<'a> {
    basis: &'a [Bits],
    current: Bits,
    step: u64,
    total: u64,
}

impl Iterator for SpanIter<'_> {
    type Item = Bits;

    fn next(&mut self) -> Option<Bits> {
        if self.step >= self.total {
            return None;
        }
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.current ^= &self.basis[flip];
        }
        self.step += 1;
        Some(self.current.clone())
    }
}
