//! Packed fixed-length bit vectors.
//!
//! Storage is a small inline buffer of `u64` words, so vectors of up to 128
//! bits never touch the allocator. All binary operations require equal
//! lengths; the unused high bits of the last word are kept at zero.

use core::fmt;
use core::ops::{BitAndAssign, BitXorAssign};

use smallvec::SmallVec;

const WORD: usize = 64;

type Words = SmallVec<[u64; 2]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Words,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(word_count(len), 0);
        Self { len, words }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self::zeros(len);
        for w in b.words.iter_mut() {
            *w = !0;
        }
        b.mask_tail();
        b
    }

    /// Vector with a single set bit.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut b = Self::zeros(len);
        b.set(index, true);
        b
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Self::zeros(len);
        for i in indices {
            b.set(i, true);
        }
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            if v {
                b.set(i, true);
            }
        }
        b
    }

    /// Builds from the low `len` bits of `value` (bit `i` of the integer is entry `i`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut b = Self::zeros(len);
        if len > 0 {
            b.words[0] = value;
            b.mask_tail();
        }
        b
    }

    /// Low 64 bits as an integer.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    /// Parses a string of `0`/`1` characters, first character is entry 0.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        let mut b = Self::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => b.set(i, true),
                _ => return None,
            }
        }
        Some(b)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let m = 1u64 << (i % WORD);
        if v {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        for w in self.words.iter_mut() {
            *w = 0;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    #[inline]
    pub fn dot(&self, other: &Self) -> bool {
        self.check_len(other);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// Number of positions set in both vectors.
    #[inline]
    pub fn and_count(&self, other: &Self) -> usize {
        self.check_len(other);
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    #[inline]
    pub fn intersects(&self, other: &Self) -> bool {
        self.check_len(other);
        self.words.iter().zip(other.words.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r ^= other;
        r
    }

    pub fn and(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r &= other;
        r
    }

    pub fn or_assign(&mut self, other: &Self) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn and_not_assign(&mut self, other: &Self) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    /// Indices of set bits in increasing order.
    pub fn ones_iter(&self) -> OnesIter<'_> {
        OnesIter {
            words: &self.words,
            word_index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Entries `start..start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len);
        let mut r = Self::zeros(len);
        for i in self.ones_iter() {
            if i >= start && i < start + len {
                r.set(i - start, true);
            }
        }
        r
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut r = Self::zeros(self.len + other.len);
        for i in self.ones_iter() {
            r.set(i, true);
        }
        for i in other.ones_iter() {
            r.set(self.len + i, true);
        }
        r
    }

    /// Zero-extends (or truncates) to `len` bits.
    pub fn resized(&self, len: usize) -> Self {
        let mut r = Self::zeros(len);
        for i in self.ones_iter() {
            if i < len {
                r.set(i, true);
            }
        }
        r
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    fn check_len(&self, other: &Self) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
    }
}

impl BitXorAssign<&Bits> for Bits {
    #[inline]
    fn bitxor_assign(&mut self, rhs: &Bits) {
        self.check_len(rhs);
        for (a, b) in self.words.iter_mut().zip(rhs.words.iter()) {
            *a ^= b;
        }
    }
}

impl BitAndAssign<&Bits> for Bits {
    #[inline]
    fn bitand_assign(&mut self, rhs: &Bits) {
        self.check_len(rhs);
        for (a, b) in self.words.iter_mut().zip(rhs.words.iter()) {
            *a &= b;
        }
    }
}

pub struct OnesIter<'a> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
}

impl Iterator for OnesIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_index * WORD + tz);
            }
            self.word_index += 1;
            if self.word_index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_index];
        }
    }
}

/// Bitstring rendering, entry 0 first.
impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

/// Lowercase hex with entry 0 as the least significant bit.
pub struct Hex<'a>(pub &'a Bits);

impl fmt::Display for Hex<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = self.0;
        let nibbles = bits.len().div_ceil(4).max(1);
        for k in (0..nibbles).rev() {
            let mut v = 0u8;
            for j in 0..4 {
                let i = 4 * k + j;
                if i < bits.len() && bits.get(i) {
                    v |= 1 << j;
                }
            }
            write!(f, "{v:x}")?;
        }
        Ok(())
    }
}
