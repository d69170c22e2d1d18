//! Pauli operators in binary symplectic form.
//!
//! An operator is stored as `i^k · P_1 ⊗ … ⊗ P_n` where each letter is one
//! of the Hermitian matrices I, X, Y, Z. The bit pair `(x_j, z_j)` selects the
//! letter: `(0,0)=I`, `(1,0)=X`, `(1,1)=Y`, `(0,1)=Z`. With this convention
//! `"Y"` parses to phase `+1`, and the single-qubit product `X·Z = −iY`.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::bits::Bits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PauliError {
    Empty,
    InvalidChar { position: usize, found: char },
    LengthMismatch { left: usize, right: usize },
    UnsupportedPhase,
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("empty Pauli string"),
            Self::InvalidChar { position, found } => {
                write!(f, "invalid character {found:?} at position {position}")
            }
            Self::LengthMismatch { left, right } => {
                write!(f, "Pauli length mismatch: {left} vs {right}")
            }
            Self::UnsupportedPhase => f.write_str("operator must have a real (±1) phase"),
        }
    }
}

impl core::error::Error for PauliError {}

/// A power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Phase {
    #[default]
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    #[inline]
    pub fn from_exponent(k: u8) -> Self {
        match k & 3 {
            0 => Self::PlusOne,
            1 => Self::PlusI,
            2 => Self::MinusOne,
            _ => Self::MinusI,
        }
    }

    #[inline]
    pub fn exponent(self) -> u8 {
        match self {
            Self::PlusOne => 0,
            Self::PlusI => 1,
            Self::MinusOne => 2,
            Self::MinusI => 3,
        }
    }

    #[inline]
    pub fn is_real(self) -> bool {
        matches!(self, Self::PlusOne | Self::MinusOne)
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        matches!(self, Self::MinusOne)
    }

    #[inline]
    pub fn mul(self, other: Self) -> Self {
        Self::from_exponent(self.exponent() + other.exponent())
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::from_exponent(4 - self.exponent())
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Self::PlusOne => "",
            Self::PlusI => "i",
            Self::MinusOne => "-",
            Self::MinusI => "-i",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Self::I,
            (true, false) => Self::X,
            (true, true) => Self::Y,
            (false, true) => Self::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Self::I => (false, false),
            Self::X => (true, false),
            Self::Y => (true, true),
            Self::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    phase: Phase,
    x: Bits,
    z: Bits,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        Self { phase: Phase::PlusOne, x: Bits::zeros(n), z: Bits::zeros(n) }
    }

    pub fn from_parts(phase: Phase, x: Bits, z: Bits) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::LengthMismatch { left: x.len(), right: z.len() });
        }
        Ok(Self { phase, x, z })
    }

    /// Single-qubit operator `letter` on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set(q, letter);
        p
    }

    pub fn x_type(support: Bits) -> Self {
        let n = support.len();
        Self { phase: Phase::PlusOne, x: support, z: Bits::zeros(n) }
    }

    pub fn z_type(support: Bits) -> Self {
        let n = support.len();
        Self { phase: Phase::PlusOne, x: Bits::zeros(n), z: support }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    #[inline]
    pub fn x(&self) -> &Bits {
        &self.x
    }

    #[inline]
    pub fn z(&self) -> &Bits {
        &self.z
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn negated(mut self) -> Self {
        self.phase = self.phase.mul(Phase::MinusOne);
        self
    }

    #[inline]
    pub fn get(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    #[inline]
    pub fn set(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s.count_ones()
    }

    pub fn support(&self) -> Bits {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s
    }

    /// Identity body, any phase.
    pub fn is_identity_body(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    /// Symplectic product is zero. Panics on length mismatch.
    #[inline]
    pub fn commutes_with(&self, other: &Self) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    /// `self · other` with exact phase. Panics on length mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.mul_assign_right(other);
        r
    }

    /// Replaces `self` by `self · other`.
    pub fn mul_assign_right(&mut self, other: &Self) {
        assert_eq!(self.len(), other.len(), "Pauli length mismatch");
        let mut plus = 0usize;
        let mut minus = 0usize;
        for (i, (&x1, &z1)) in self.x.words().iter().zip(self.z.words()).enumerate() {
            let x2 = other.x.words()[i];
            let z2 = other.z.words()[i];
            let (xo1, y1, zo1) = (x1 & !z1, x1 & z1, z1 & !x1);
            let (xo2, y2, zo2) = (x2 & !z2, x2 & z2, z2 & !x2);
            plus += ((xo1 & y2) | (y1 & zo2) | (zo1 & xo2)).count_ones() as usize;
            minus += ((xo1 & zo2) | (y1 & xo2) | (zo1 & y2)).count_ones() as usize;
        }
        let k = self.phase.exponent() as usize + other.phase.exponent() as usize + plus + 3 * minus;
        self.phase = Phase::from_exponent((k % 4) as u8);
        self.x ^= &other.x;
        self.z ^= &other.z;
    }

    /// Multiplicative inverse. Letters are involutions, so only the phase changes.
    pub fn inverse(&self) -> Self {
        let mut r = self.clone();
        r.phase = r.phase.conj();
        r
    }

    /// Bits `x | z` concatenated, used as a symplectic row `(x, z)`.
    pub fn symplectic(&self) -> Bits {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(v: &Bits) -> Self {
        let n = v.len() / 2;
        Self { phase: Phase::PlusOne, x: v.slice(0, n), z: v.slice(n, n) }
    }

    /// Restriction to qubits `0..n`, phase kept.
    pub fn truncated(&self, n: usize) -> Self {
        Self { phase: self.phase, x: self.x.resized(n), z: self.z.resized(n) }
    }

    pub fn body_string(&self) -> String {
        (0..self.len()).map(|q| self.get(q).as_char()).collect()
    }
}

/// Checked symplectic commutation test.
pub fn commutes(p: &Pauli, q: &Pauli) -> Result<bool, PauliError> {
    if p.len() != q.len() {
        return Err(PauliError::LengthMismatch { left: p.len(), right: q.len() });
    }
    Ok(p.commutes_with(q))
}

/// Checked product `p · q`.
pub fn multiply(p: &Pauli, q: &Pauli) -> Result<Pauli, PauliError> {
    if p.len() != q.len() {
        return Err(PauliError::LengthMismatch { left: p.len(), right: q.len() });
    }
    Ok(p.mul(q))
}

pub fn parse_pauli(text: &str) -> Result<Pauli, PauliError> {
    text.parse()
}

impl FromStr for Pauli {
    type Err = PauliError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (phase, body, offset) = if let Some(rest) = text.strip_prefix("-i") {
            (Phase::MinusI, rest, 2)
        } else if let Some(rest) = text.strip_prefix('-') {
            (Phase::MinusOne, rest, 1)
        } else if let Some(rest) = text.strip_prefix('+') {
            (Phase::PlusOne, rest, 1)
        } else if let Some(rest) = text.strip_prefix('i') {
            (Phase::PlusI, rest, 1)
        } else {
            (Phase::PlusOne, text, 0)
        };
        if body.is_empty() {
            return Err(PauliError::Empty);
        }
        let n = body.chars().count();
        let mut p = Pauli::identity(n);
        p.phase = phase;
        for (q, c) in body.chars().enumerate() {
            let letter =
                Letter::from_char(c).ok_or(PauliError::InvalidChar { position: offset + q, found: c })?;
            p.set(q, letter);
        }
        Ok(p)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        for q in 0..self.len() {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec::Vec;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn p(s: &str) -> Pauli {
        s.parse().unwrap()
    }

    type M2 = [[Complex64; 2]; 2];

    fn letter_matrix(l: Letter) -> M2 {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match l {
            Letter::I => [[one, o], [o, one]],
            Letter::X => [[o, one], [one, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[one, o], [o, -one]],
        }
    }

    fn matmul(a: &M2, b: &M2) -> M2 {
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    r[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        r
    }

    fn phase_value(ph: Phase) -> Complex64 {
        match ph {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    #[test]
    fn parse_examples() {
        let a = p("-ZZII");
        assert_eq!(a.phase(), Phase::MinusOne);
        assert_eq!(a.x().to_string(), "0000");
        assert_eq!(a.z().to_string(), "1100");
        let b = p("IIII");
        assert_eq!(b.phase(), Phase::PlusOne);
        assert!(b.is_identity_body());
        let c = p("XYZI");
        assert_eq!(c.x().to_string(), "1100");
        assert_eq!(c.z().to_string(), "0110");
    }

    #[test]
    fn parse_errors_name_position() {
        assert_eq!("-XQZ".parse::<Pauli>(), Err(PauliError::InvalidChar { position: 2, found: 'Q' }));
        assert_eq!("".parse::<Pauli>(), Err(PauliError::Empty));
        assert_eq!("-i".parse::<Pauli>(), Err(PauliError::Empty));
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes_with(&p("Z")));
        assert!(p("XXXX").commutes_with(&p("-ZZII")));
        let z1 = Pauli::single(12, 0, Letter::Z);
        let g1 = Pauli::x_type(Bits::from_indices(12, [0, 1, 2, 3]));
        assert!(!z1.commutes_with(&g1));
        assert!(matches!(commutes(&p("X"), &p("XX")), Err(PauliError::LengthMismatch { .. })));
    }

    #[test]
    fn product_examples() {
        assert_eq!(p("-ZZII").mul(&p("-IIZZ")), p("ZZZZ"));
        assert_eq!(p("X").mul(&p("Z")), p("-iY"));
        assert_eq!(p("Z").mul(&p("X")), p("iY"));
    }

    // Every single-qubit product agrees with explicit 2x2 matrices.
    #[test]
    fn single_qubit_products_match_matrices() {
        let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
        for &a in &letters {
            for &b in &letters {
                let mut pa = Pauli::identity(1);
                pa.set(0, a);
                let mut pb = Pauli::identity(1);
                pb.set(0, b);
                let prod = pa.mul(&pb);
                let expected = matmul(&letter_matrix(a), &letter_matrix(b));
                let body = letter_matrix(prod.get(0));
                let ph = phase_value(prod.phase());
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((ph * body[i][j] - expected[i][j]).norm() < 1e-12, "{a:?}{b:?}");
                    }
                }
            }
        }
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = Pauli> {
        (0u8..4, proptest::collection::vec(0u8..4, n)).prop_map(move |(ph, letters)| {
            let mut r = Pauli::identity(letters.len());
            for (q, l) in letters.iter().enumerate() {
                r.set(q, [Letter::I, Letter::X, Letter::Y, Letter::Z][*l as usize]);
            }
            r.with_phase(Phase::from_exponent(ph))
        })
    }

    proptest! {
        #[test]
        fn commutes_is_symmetric(a in arb_pauli(70), b in arb_pauli(70)) {
            prop_assert_eq!(a.commutes_with(&b), b.commutes_with(&a));
        }

        #[test]
        fn product_is_associative(a in arb_pauli(9), b in arb_pauli(9), c in arb_pauli(9)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn inverse_gives_identity(a in arb_pauli(67)) {
            prop_assert_eq!(a.mul(&a.inverse()), Pauli::identity(67));
        }

        #[test]
        fn square_is_real_identity(a in arb_pauli(11)) {
            let sq = a.mul(&a);
            prop_assert!(sq.is_identity_body());
            prop_assert!(sq.phase().is_real());
        }

        #[test]
        fn weight_subadditive(a in arb_pauli(13), b in arb_pauli(13)) {
            prop_assert!(a.mul(&b).weight() <= a.weight() + b.weight());
        }

        #[test]
        fn commuting_iff_products_agree(a in arb_pauli(8), b in arb_pauli(8)) {
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            prop_assert_eq!(a.commutes_with(&b), ab == ba);
        }

        #[test]
        fn format_parse_round_trip(a in arb_pauli(17)) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<Pauli>().unwrap(), a);
        }
    }

    #[test]
    fn multi_word_products() {
        let letters: Vec<Letter> = (0..130).map(|i| [Letter::X, Letter::Y, Letter::Z][i % 3]).collect();
        let mut a = Pauli::identity(130);
        for (q, l) in letters.iter().enumerate() {
            a.set(q, *l);
        }
        assert_eq!(a.mul(&a), Pauli::identity(130));
    }
}
