//! Stabilizer and CSS codes, dual-rail concatenation, constant-excitation
//! checks, brute-force distance, and the built-in code catalogue.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::bits::Bits;
use crate::gf2::{self, Basis};
use crate::pauli::{Letter, Pauli, PauliError, Phase};

/// Names accepted by [`builtin`] and [`builtin_stabilizer`].
pub const BUILTIN_NAMES: [&str; 4] = ["c4", "c12", "c14", "c10"];

/// Largest `C₁` dimension [`check_ce_full`] will enumerate.
pub const CE_ENUMERATION_CAP_LOG2: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    Pauli(PauliError),
    Length { expected: usize, found: usize },
    ImaginaryPhase { generator: usize },
    IdentityGenerator { generator: usize },
    NonCommuting { first: usize, second: usize },
    Dependent { generator: usize },
    LogicalCount { x: usize, z: usize, k: usize },
    LogicalNotInNormalizer { operator: String },
    LogicalPairing { x: usize, z: usize },
    NotCss { generator: usize },
    NoConsistentShift,
    ShiftMismatch { generator: usize },
    UnknownCode { name: String },
    EnumerationTooLarge { log2_size: usize, cap_log2: usize },
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pauli(e) => write!(f, "{e}"),
            Self::Length { expected, found } => {
                write!(f, "operator has {found} qubits, code has {expected}")
            }
            Self::ImaginaryPhase { generator } => {
                write!(f, "generator {generator} has an imaginary phase")
            }
            Self::IdentityGenerator { generator } => {
                write!(f, "generator {generator} is proportional to the identity")
            }
            Self::NonCommuting { first, second } => {
                write!(f, "generators {first} and {second} anticommute")
            }
            Self::Dependent { generator } => {
                write!(f, "generator {generator} is dependent on the previous ones")
            }
            Self::LogicalCount { x, z, k } => {
                write!(f, "expected {k} logical X and Z operators, got {x} and {z}")
            }
            Self::LogicalNotInNormalizer { operator } => {
                write!(f, "logical operator {operator} anticommutes with a generator")
            }
            Self::LogicalPairing { x, z } => {
                write!(f, "logical X{x} and Z{z} have the wrong commutation relation")
            }
            Self::NotCss { generator } => write!(f, "generator {generator} mixes X and Z"),
            Self::NoConsistentShift => f.write_str("no shift vector reproduces the Z generator signs"),
            Self::ShiftMismatch { generator } => {
                write!(f, "shift vector disagrees with the sign of generator {generator}")
            }
            Self::UnknownCode { name } => {
                write!(f, "unknown code {name:?}; valid names: {}", BUILTIN_NAMES.join(", "))
            }
            Self::EnumerationTooLarge { log2_size, cap_log2 } => {
                write!(f, "enumeration of 2^{log2_size} words exceeds the cap 2^{cap_log2}")
            }
        }
    }
}

impl core::error::Error for CodeError {}

impl From<PauliError> for CodeError {
    fn from(e: PauliError) -> Self {
        Self::Pauli(e)
    }
}

/// The group generated by a list of commuting Paulis with real phases.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    generators: Vec<Pauli>,
    basis: Basis,
}

impl StabilizerGroup {
    pub fn new(generators: &[Pauli]) -> Self {
        let width = generators.first().map_or(0, |g| 2 * g.len());
        let rows: Vec<Bits> = generators.iter().map(Pauli::symplectic).collect();
        Self { generators: generators.to_vec(), basis: Basis::from_rows(width, rows.iter()) }
    }

    /// Whether `±p` (or `±ip`) is in the group, i.e. `p` acts as a phase on the code space.
    pub fn contains_up_to_phase(&self, p: &Pauli) -> bool {
        self.basis.contains(&p.symplectic())
    }

    /// The group element with the same body as `p`, if any.
    pub fn element_with_body(&self, p: &Pauli) -> Option<Pauli> {
        let combo = self.basis.solve(&p.symplectic())?;
        let n = p.len();
        let mut acc = Pauli::identity(n);
        for i in combo {
            acc.mul_assign_right(&self.generators[i]);
        }
        Some(acc)
    }

    /// Sign-exact membership.
    pub fn contains(&self, p: &Pauli) -> bool {
        self.element_with_body(p).is_some_and(|e| e.phase() == p.phase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    generators: Vec<Pauli>,
    logical_x: Vec<Pauli>,
    logical_z: Vec<Pauli>,
}

impl StabilizerCode {
    /// Validates and builds a code. `k` is `n − generators.len()`.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Pauli>,
        logical_x: Vec<Pauli>,
        logical_z: Vec<Pauli>,
    ) -> Result<Self, CodeError> {
        let n = generators.first().map_or_else(
            || logical_x.first().map_or(0, Pauli::len),
            Pauli::len,
        );
        let code = Self { name: name.into(), n, generators, logical_x, logical_z };
        code.validate()?;
        Ok(code)
    }

    pub fn parse(
        name: &str,
        generators: &[&str],
        logical_x: &[&str],
        logical_z: &[&str],
    ) -> Result<Self, CodeError> {
        let parse_all = |v: &[&str]| -> Result<Vec<Pauli>, CodeError> {
            v.iter().map(|s| s.parse::<Pauli>().map_err(CodeError::from)).collect()
        };
        Self::new(name, parse_all(generators)?, parse_all(logical_x)?, parse_all(logical_z)?)
    }

    fn validate(&self) -> Result<(), CodeError> {
        let n = self.n;
        let all = self.generators.iter().chain(&self.logical_x).chain(&self.logical_z);
        for p in all {
            if p.len() != n {
                return Err(CodeError::Length { expected: n, found: p.len() });
            }
        }
        let mut basis = Basis::new(2 * n);
        for (i, g) in self.generators.iter().enumerate() {
            if !g.phase().is_real() {
                return Err(CodeError::ImaginaryPhase { generator: i });
            }
            if g.is_identity_body() {
                return Err(CodeError::IdentityGenerator { generator: i });
            }
            for (j, h) in self.generators.iter().enumerate().skip(i + 1) {
                if !g.commutes_with(h) {
                    return Err(CodeError::NonCommuting { first: i, second: j });
                }
            }
            if !basis.insert(&g.symplectic()) {
                return Err(CodeError::Dependent { generator: i });
            }
        }
        let k = self.k();
        if self.logical_x.len() != k || self.logical_z.len() != k {
            return Err(CodeError::LogicalCount { x: self.logical_x.len(), z: self.logical_z.len(), k });
        }
        for l in self.logical_x.iter().chain(&self.logical_z) {
            if self.generators.iter().any(|g| !g.commutes_with(l)) {
                return Err(CodeError::LogicalNotInNormalizer { operator: l.to_string() });
            }
        }
        for (i, lx) in self.logical_x.iter().enumerate() {
            for (j, lz) in self.logical_z.iter().enumerate() {
                if lx.commutes_with(lz) == (i == j) {
                    return Err(CodeError::LogicalPairing { x: i, z: j });
                }
            }
            for (j, other) in self.logical_x.iter().enumerate() {
                if !lx.commutes_with(other) {
                    return Err(CodeError::LogicalPairing { x: i, z: j });
                }
            }
        }
        for (i, lz) in self.logical_z.iter().enumerate() {
            for (j, other) in self.logical_z.iter().enumerate() {
                if !lz.commutes_with(other) {
                    return Err(CodeError::LogicalPairing { x: j, z: i });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.n - self.generators.len()
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.generators
    }

    pub fn logical_x(&self) -> &[Pauli] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[Pauli] {
        &self.logical_z
    }

    pub fn group(&self) -> StabilizerGroup {
        StabilizerGroup::new(&self.generators)
    }

    /// Bit `i` is set iff `error` anticommutes with generator `i`.
    pub fn syndrome_of(&self, error: &Pauli) -> Result<Bits, CodeError> {
        if error.len() != self.n {
            return Err(CodeError::Length { expected: self.n, found: error.len() });
        }
        Ok(self.syndrome_unchecked(error))
    }

    pub(crate) fn syndrome_unchecked(&self, error: &Pauli) -> Bits {
        let mut s = Bits::zeros(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if !g.commutes_with(error) {
                s.set(i, true);
            }
        }
        s
    }

    pub fn is_css(&self) -> bool {
        self.generators.iter().all(|g| g.is_x_type() || g.is_z_type())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// A stabilizer code whose generators are each purely X-type or purely Z-type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssCode {
    base: StabilizerCode,
    x_rows: Vec<usize>,
    z_rows: Vec<usize>,
    shift_y: Bits,
    dual_rail: bool,
}

impl CssCode {
    /// Classifies generators and solves for a shift `y` with
    /// `sign(g) = (−1)^(h·y)` for every Z-type generator `g` with support `h`.
    /// Logical Z operators of pure Z type are included in the system, so `y`
    /// is a basis-state representative of `|0…0⟩_L`.
    pub fn from_stabilizer(base: StabilizerCode) -> Result<Self, CodeError> {
        let (x_rows, z_rows) = classify(&base)?;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for &i in &z_rows {
            rows.push(base.generators[i].z().clone());
            rhs.push(base.generators[i].phase().is_negative());
        }
        for l in base.logical_z.iter().filter(|l| l.is_z_type() && l.phase().is_real()) {
            rows.push(l.z().clone());
            rhs.push(l.phase().is_negative());
        }
        let shift_y = gf2::solve_dot_system(&rows, &rhs, base.n).ok_or(CodeError::NoConsistentShift)?;
        let dual_rail = detect_dual_rail(&base);
        Ok(Self { base, x_rows, z_rows, shift_y, dual_rail })
    }

    /// Builds with an explicitly chosen shift; rejects shifts inconsistent with the signs.
    pub fn with_shift(base: StabilizerCode, shift_y: Bits) -> Result<Self, CodeError> {
        let (x_rows, z_rows) = classify(&base)?;
        if shift_y.len() != base.n {
            return Err(CodeError::Length { expected: base.n, found: shift_y.len() });
        }
        for &i in &z_rows {
            let g = &base.generators[i];
            if g.z().dot(&shift_y) != g.phase().is_negative() {
                return Err(CodeError::ShiftMismatch { generator: i });
            }
        }
        let dual_rail = detect_dual_rail(&base);
        Ok(Self { base, x_rows, z_rows, shift_y, dual_rail })
    }

    pub fn stabilizer(&self) -> &StabilizerCode {
        &self.base
    }

    pub fn into_stabilizer(self) -> StabilizerCode {
        self.base
    }

    pub fn name(&self) -> &str {
        self.base.name()
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    pub fn generators(&self) -> &[Pauli] {
        self.base.generators()
    }

    pub fn x_rows(&self) -> &[usize] {
        &self.x_rows
    }

    pub fn z_rows(&self) -> &[usize] {
        &self.z_rows
    }

    pub fn shift_y(&self) -> &Bits {
        &self.shift_y
    }

    /// Qubits `(2j, 2j+1)` form dual-rail pairs stabilized by `−Z_{2j}Z_{2j+1}`.
    pub fn is_dual_rail(&self) -> bool {
        self.dual_rail
    }

    pub fn syndrome_of(&self, error: &Pauli) -> Result<Bits, CodeError> {
        self.base.syndrome_of(error)
    }

    /// Supports of the X-type generators.
    pub fn x_supports(&self) -> Vec<Bits> {
        self.x_rows.iter().map(|&i| self.base.generators[i].x().clone()).collect()
    }

    /// Supports of the Z-type generators.
    pub fn z_supports(&self) -> Vec<Bits> {
        self.z_rows.iter().map(|&i| self.base.generators[i].z().clone()).collect()
    }
}

fn classify(base: &StabilizerCode) -> Result<(Vec<usize>, Vec<usize>), CodeError> {
    let mut x_rows = Vec::new();
    let mut z_rows = Vec::new();
    for (i, g) in base.generators.iter().enumerate() {
        if g.is_z_type() {
            z_rows.push(i);
        } else if g.is_x_type() {
            if g.phase() != Phase::PlusOne {
                return Err(CodeError::ShiftMismatch { generator: i });
            }
            x_rows.push(i);
        } else {
            return Err(CodeError::NotCss { generator: i });
        }
    }
    Ok((x_rows, z_rows))
}

fn detect_dual_rail(base: &StabilizerCode) -> bool {
    let n = base.n;
    if n % 2 != 0 || n == 0 {
        return false;
    }
    let group = base.group();
    (0..n / 2).all(|j| {
        let pair = Pauli::z_type(Bits::from_indices(n, [2 * j, 2 * j + 1])).negated();
        group.contains(&pair)
    })
}

/// Letter substitution `I→II, X→XX, Y→YX, Z→ZI` on consecutive qubit pairs.
pub fn tau(p: &Pauli) -> Result<Pauli, CodeError> {
    if !p.phase().is_real() {
        return Err(CodeError::Pauli(PauliError::UnsupportedPhase));
    }
    let n = p.len();
    let mut out = Pauli::identity(2 * n).with_phase(p.phase());
    for q in 0..n {
        let (a, b) = match p.get(q) {
            Letter::I => (Letter::I, Letter::I),
            Letter::X => (Letter::X, Letter::X),
            Letter::Y => (Letter::Y, Letter::X),
            Letter::Z => (Letter::Z, Letter::I),
        };
        out.set(2 * q, a);
        out.set(2 * q + 1, b);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ConcatenationResult {
    pub code: StabilizerCode,
    /// `X` on the second qubit of each pair; partner `j` anticommutes only
    /// with the pair generator `−Z_{2j}Z_{2j+1}`.
    pub symplectic_partners: Vec<Pauli>,
}

/// Dual-rail concatenation: lifts every generator and logical by [`tau`] and
/// appends `−Z_{2j}Z_{2j+1}` for each input qubit `j`.
pub fn dual_rail_concatenate(code: &StabilizerCode) -> Result<ConcatenationResult, CodeError> {
    code.validate()?;
    let n = code.n();
    let mut gens = code.generators().iter().map(tau).collect::<Result<Vec<_>, _>>()?;
    for j in 0..n {
        gens.push(Pauli::z_type(Bits::from_indices(2 * n, [2 * j, 2 * j + 1])).negated());
    }
    let lx = code.logical_x().iter().map(tau).collect::<Result<Vec<_>, _>>()?;
    let lz = code.logical_z().iter().map(tau).collect::<Result<Vec<_>, _>>()?;
    let name = format!("dr-{}", code.name());
    let out = StabilizerCode::new(name, gens, lx, lz)?;
    let partners = (0..n).map(|j| Pauli::single(2 * n, 2 * j + 1, Letter::X)).collect();
    Ok(ConcatenationResult { code: out, symplectic_partners: partners })
}

/// CSS form of [`dual_rail_concatenate`], with the lifted shift
/// `y'_{2j} = y_j`, `y'_{2j+1} = 1 − y_j`.
pub fn dual_rail_concatenate_css(code: &CssCode) -> Result<CssCode, CodeError> {
    let lifted = dual_rail_concatenate(code.stabilizer())?;
    let n = code.n();
    let mut y = Bits::zeros(2 * n);
    for j in 0..n {
        if code.shift_y().get(j) {
            y.set(2 * j, true);
        } else {
            y.set(2 * j + 1, true);
        }
    }
    CssCode::with_shift(lifted.code, y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeNecessaryReport {
    pub holds: bool,
    /// Parity of `w` such that `(−1)^w Z^⊗n` is a group element, if one is.
    pub excitation_parity: Option<bool>,
    pub violations: Vec<String>,
}

/// Necessary condition for constant excitation: `±Z^⊗n` is in the group and
/// every generator and logical operator has an even number of X/Y letters.
pub fn check_ce_necessary(code: &StabilizerCode) -> CeNecessaryReport {
    let n = code.n();
    let mut violations = Vec::new();
    let all_z = Pauli::z_type(Bits::ones(n));
    let excitation_parity = code.group().element_with_body(&all_z).map(|e| e.phase().is_negative());
    if excitation_parity.is_none() {
        violations.push("Z on every qubit is not in the stabilizer group".to_string());
    }
    let named = code
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| (format!("generator {i}"), g))
        .chain(code.logical_x().iter().enumerate().map(|(i, l)| (format!("logical X{i}"), l)))
        .chain(code.logical_z().iter().enumerate().map(|(i, l)| (format!("logical Z{i}"), l)));
    for (label, p) in named {
        if p.x().count_ones() % 2 == 1 {
            violations.push(format!("{label} {p} has an odd number of X/Y letters"));
        }
    }
    CeNecessaryReport { holds: violations.is_empty(), excitation_parity, violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeFullReport {
    pub constant: bool,
    /// Common Hamming weight when `constant`.
    pub weight: Option<usize>,
    pub weights_seen: BTreeSet<usize>,
    pub words_checked: u64,
}

/// Enumerates every basis state `y + C₁` appearing in any codeword and
/// checks they share one Hamming weight.
pub fn check_ce_full(code: &CssCode) -> Result<CeFullReport, CodeError> {
    let n = code.n();
    let c1 = gf2::nullspace(&code.z_supports(), n);
    if c1.len() > CE_ENUMERATION_CAP_LOG2 {
        return Err(CodeError::EnumerationTooLarge {
            log2_size: c1.len(),
            cap_log2: CE_ENUMERATION_CAP_LOG2,
        });
    }
    let mut weights_seen = BTreeSet::new();
    let mut words_checked = 0u64;
    for v in gf2::span(&c1, n) {
        let mut w = v;
        w ^= code.shift_y();
        weights_seen.insert(w.count_ones());
        words_checked += 1;
    }
    let constant = weights_seen.len() == 1;
    let weight = if constant { weights_seen.iter().next().copied() } else { None };
    Ok(CeFullReport { constant, weight, weights_seen, words_checked })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Exact(usize),
    GreaterThan(usize),
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(d) => write!(f, "{d}"),
            Self::GreaterThan(w) => write!(f, ">{w}"),
        }
    }
}

/// `Σ_{w ≤ max_w} C(n, w)·3^w`, the number of Paulis [`distance_brute_force`] may visit.
pub fn distance_search_cost(n: usize, max_w: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut pow3 = 1u128;
    for w in 0..=max_w.min(n) {
        total = total.saturating_add(binom.saturating_mul(pow3));
        binom = binom * (n - w) as u128 / (w + 1) as u128;
        pow3 = pow3.saturating_mul(3);
    }
    total
}

/// Minimum weight of a Pauli commuting with every generator that is not a
/// stabilizer up to phase.
pub fn distance_brute_force(code: &StabilizerCode, max_w: usize) -> Distance {
    let n = code.n();
    let group = code.group();
    let gens: Vec<(Bits, Bits)> = code.generators().iter().map(|g| (g.x().clone(), g.z().clone())).collect();
    for w in 1..=max_w.min(n) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            for letters in 0..3usize.pow(w as u32) {
                let mut p = Pauli::identity(n);
                let mut rest = letters;
                for &q in &support {
                    p.set(q, Letter::NON_IDENTITY[rest % 3]);
                    rest /= 3;
                }
                let in_normalizer =
                    gens.iter().all(|(gx, gz)| p.x().dot(gz) == p.z().dot(gx));
                if in_normalizer && !group.contains_up_to_phase(&p) {
                    return Distance::Exact(w);
                }
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Distance::GreaterThan(max_w)
}

/// Advances a sorted index combination; false after the last one.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Logical bases for a CSS code from its X and Z supports, paired so that
/// `X̄_i` anticommutes exactly with `Z̄_i`. Low-weight candidates are preferred.
pub fn derive_css_logicals(n: usize, x_supports: &[Bits], z_supports: &[Bits]) -> (Vec<Bits>, Vec<Bits>) {
    let mut lx = pick_coset_reps(n, &gf2::nullspace(z_supports, n), x_supports);
    let mut lz = pick_coset_reps(n, &gf2::nullspace(x_supports, n), z_supports);
    let k = lx.len();
    for i in 0..k {
        let j = (i..k).find(|&j| lx[i].dot(&lz[j])).expect("logical pairing is nondegenerate");
        lz.swap(i, j);
        for j in 0..k {
            if j != i && lx[i].dot(&lz[j]) {
                let zi = lz[i].clone();
                lz[j] ^= &zi;
            }
        }
        for m in 0..k {
            if m != i && lx[m].dot(&lz[i]) {
                let xi = lx[i].clone();
                lx[m] ^= &xi;
            }
        }
    }
    (lx, lz)
}

fn pick_coset_reps(n: usize, kernel: &[Bits], stabilizer_rows: &[Bits]) -> Vec<Bits> {
    let mut candidates: Vec<Bits> = if kernel.len() <= 16 {
        gf2::span(kernel, n).filter(|v| !v.is_zero()).collect()
    } else {
        kernel.to_vec()
    };
    candidates.sort_by_key(|v| (v.count_ones(), v.clone()));
    let mut basis = Basis::from_rows(n, stabilizer_rows.iter());
    let mut reps = Vec::new();
    for v in candidates {
        if basis.insert(&v) {
            reps.push(v);
        }
    }
    reps
}

/// Built-in codes as stabilizer codes, including the non-CSS `c10`.
pub fn builtin_stabilizer(name: &str) -> Result<StabilizerCode, CodeError> {
    match name {
        "c4" => StabilizerCode::parse("c4", &["XXXX", "-ZZII", "-IIZZ"], &["XXII"], &["IZZI"]),
        "c12" => StabilizerCode::parse(
            "c12",
            &[
                "XXXXIIIIIIII",
                "IIXXXXIIIIII",
                "IIIIIIXXXXII",
                "IIIIIIIIXXXX",
                "ZIZIZIZIZIZI",
                "-ZZIIIIIIIIII",
                "-IIZZIIIIIIII",
                "-IIIIZZIIIIII",
                "-IIIIIIZZIIII",
                "-IIIIIIIIZZII",
                "-IIIIIIIIIIZZ",
            ],
            &["IIIIXXIIIIXX"],
            &["IIIIIIZIZIIZ"],
        ),
        "c14" => c14(),
        "c10" => {
            let seed = reference::five_qubit();
            Ok(dual_rail_concatenate(&seed)?.code.with_name("c10"))
        }
        _ => Err(CodeError::UnknownCode { name: name.to_string() }),
    }
}

/// Built-in CSS codes; `c10` is rejected with [`CodeError::NotCss`].
pub fn builtin(name: &str) -> Result<CssCode, CodeError> {
    CssCode::from_stabilizer(builtin_stabilizer(name)?)
}

fn c14() -> Result<StabilizerCode, CodeError> {
    let mut gens: Vec<Pauli> = ["XXIIXXIIXXIIXX", "IIXXXXIIIIXXXX", "IIIIIIXXXXXXXX", "ZIZIZIZIZIZIZI"]
        .iter()
        .map(|s| s.parse::<Pauli>())
        .collect::<Result<_, _>>()?;
    for j in 0..7 {
        gens.push(Pauli::z_type(Bits::from_indices(14, [2 * j, 2 * j + 1])).negated());
    }
    let xs: Vec<Bits> = gens.iter().filter(|g| g.is_x_type()).map(|g| g.x().clone()).collect();
    let zs: Vec<Bits> = gens.iter().filter(|g| g.is_z_type()).map(|g| g.z().clone()).collect();
    let (lx, lz) = derive_css_logicals(14, &xs, &zs);
    StabilizerCode::new(
        "c14",
        gens,
        lx.into_iter().map(Pauli::x_type).collect(),
        lz.into_iter().map(Pauli::z_type).collect(),
    )
}

/// Small textbook codes used as concatenation inputs and as negative examples.
pub mod reference {
    use super::*;

    /// The `[[7,1,3]]` Steane code with X rows ordered so that their lifts
    /// are the first three X generators of `c14`.
    pub fn steane() -> StabilizerCode {
        StabilizerCode::parse(
            "steane7",
            &["XIXIXIX", "IXXIIXX", "IIIXXXX", "ZIZIZIZ", "IZZIIZZ", "IIIZZZZ"],
            &["XXXXXXX"],
            &["ZZZZZZZ"],
        )
        .expect("Steane code is valid")
    }

    /// A `[[6,1,2]]` CSS code whose dual-rail lift is `c12`.
    pub fn six_qubit() -> StabilizerCode {
        StabilizerCode::parse(
            "six",
            &["XXIIII", "IXXIII", "IIIXXI", "IIIIXX", "ZZZZZZ"],
            &["IIXIIX"],
            &["IIIZZZ"],
        )
        .expect("six-qubit code is valid")
    }

    /// The cyclic `[[5,1,3]]` code.
    pub fn five_qubit() -> StabilizerCode {
        StabilizerCode::parse(
            "five",
            &["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
            &["XXXXX"],
            &["ZZZZZ"],
        )
        .expect("five-qubit code is valid")
    }

    /// One Bell pair per logical qubit: the `[[2,1,1]]` code stabilized by `XX`.
    pub fn bell_pair() -> StabilizerCode {
        StabilizerCode::parse("bell", &["XX"], &["XI"], &["ZZ"]).expect("Bell code is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Pauli {
        s.parse().unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&p("IXYZ")).unwrap(), p("IIXXYXZI"));
        assert_eq!(tau(&p("III")).unwrap(), p("IIIIII"));
        assert_eq!(tau(&p("ZZZZZZ")).unwrap(), p("ZIZIZIZIZIZI"));
        assert!(tau(&p("iX")).is_err());
    }

    #[test]
    fn six_qubit_lift_is_c12() {
        let lifted = dual_rail_concatenate(&reference::six_qubit()).unwrap().code;
        let c12 = builtin_stabilizer("c12").unwrap();
        let reorder = [0usize, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        for (i, &j) in reorder.iter().enumerate() {
            assert_eq!(lifted.generators()[i], c12.generators()[j]);
        }
        let group = c12.group();
        assert_eq!(lifted.logical_x()[0], c12.logical_x()[0]);
        // Z7 Z9 Z12 is not a lift, but it equals the lifted Z̄ up to a stabilizer and sign.
        let diff = lifted.logical_z()[0].mul(&c12.logical_z()[0]);
        assert!(group.contains_up_to_phase(&diff));
    }

    #[test]
    fn bell_pairs_lift_to_c4() {
        let lifted = dual_rail_concatenate(&reference::bell_pair()).unwrap().code;
        let c4 = builtin_stabilizer("c4").unwrap();
        assert_eq!(lifted.generators(), c4.generators());
        assert!(c4.group().contains_up_to_phase(&lifted.logical_x()[0].mul(&c4.logical_x()[0])));
        assert!(c4.group().contains_up_to_phase(&lifted.logical_z()[0].mul(&c4.logical_z()[0])));
    }

    #[test]
    fn steane_lift_matches_c14_x_rows() {
        let lifted = dual_rail_concatenate(&reference::steane()).unwrap().code;
        let c14 = builtin_stabilizer("c14").unwrap();
        assert_eq!(lifted.n(), 14);
        assert_eq!(lifted.k(), 1);
        for i in 0..3 {
            assert_eq!(lifted.generators()[i], c14.generators()[i]);
        }
        assert_eq!(distance_brute_force(&lifted, 3), Distance::Exact(3));
    }

    #[test]
    fn partners_anticommute_with_their_pair_only() {
        let r = dual_rail_concatenate(&reference::six_qubit()).unwrap();
        let gens = r.code.generators();
        for (j, partner) in r.symplectic_partners.iter().enumerate() {
            for (i, g) in gens.iter().enumerate() {
                assert_eq!(!partner.commutes_with(g), i == 5 + j, "partner {j} generator {i}");
            }
        }
    }

    #[test]
    fn ce_necessary() {
        let c4 = check_ce_necessary(&builtin_stabilizer("c4").unwrap());
        assert!(c4.holds);
        assert_eq!(c4.excitation_parity, Some(false));
        assert!(check_ce_necessary(&builtin_stabilizer("c12").unwrap()).holds);
        assert!(check_ce_necessary(&builtin_stabilizer("c10").unwrap()).holds);
        let steane = check_ce_necessary(&reference::steane());
        assert!(!steane.holds);
        assert_eq!(steane.excitation_parity, None);
    }

    #[test]
    fn ce_full_weights() {
        for (name, w) in [("c4", 2), ("c12", 6), ("c14", 7)] {
            let r = check_ce_full(&builtin(name).unwrap()).unwrap();
            assert!(r.constant, "{name}: {:?}", r.weights_seen);
            assert_eq!(r.weight, Some(w));
        }
        let steane = CssCode::from_stabilizer(reference::steane()).unwrap();
        assert_eq!(steane.shift_y(), &Bits::zeros(7));
        let r = check_ce_full(&steane).unwrap();
        assert!(!r.constant);
        assert_eq!(r.weights_seen.into_iter().collect::<Vec<_>>(), [0, 3, 4, 7]);
    }

    #[test]
    fn c4_shift_reproduces_logical_zero() {
        let c4 = builtin("c4").unwrap();
        let y = c4.shift_y();
        let s = y.to_string();
        assert!(s == "0110" || s == "1001", "{s}");
    }

    #[test]
    fn distances() {
        assert_eq!(distance_brute_force(&builtin_stabilizer("c4").unwrap(), 3), Distance::Exact(2));
        assert_eq!(distance_brute_force(&builtin_stabilizer("c12").unwrap(), 3), Distance::Exact(3));
        assert_eq!(distance_brute_force(&builtin_stabilizer("c14").unwrap(), 3), Distance::Exact(3));
        // The lift of the five-qubit code only guarantees d ≥ 3; the exact value is 4.
        assert_eq!(distance_brute_force(&builtin_stabilizer("c10").unwrap(), 4), Distance::Exact(4));
        assert_eq!(distance_brute_force(&builtin_stabilizer("c12").unwrap(), 2), Distance::GreaterThan(2));
        assert_eq!(distance_search_cost(4, 2), 1 + 12 + 54);
    }

    #[test]
    fn syndrome_examples() {
        let c12 = builtin_stabilizer("c12").unwrap();
        assert!(c12.syndrome_of(&Pauli::identity(12)).unwrap().is_zero());
        let z1 = c12.syndrome_of(&Pauli::single(12, 0, Letter::Z)).unwrap();
        assert_eq!(z1.ones_iter().collect::<Vec<_>>(), [0]);
        let x1 = c12.syndrome_of(&Pauli::single(12, 0, Letter::X)).unwrap();
        assert_eq!(x1.ones_iter().collect::<Vec<_>>(), [4, 5]);
        assert!(c12.syndrome_of(&Pauli::identity(4)).is_err());
    }

    #[test]
    fn builtin_lookup() {
        assert!(matches!(builtin("c10"), Err(CodeError::NotCss { .. })));
        let err = builtin("c7").unwrap_err();
        assert!(err.to_string().contains("c4, c12, c14, c10"));
        let c4 = builtin("c4").unwrap();
        assert_eq!(c4.generators()[1], p("-ZZII"));
        assert_eq!(c4.stabilizer().logical_x()[0], p("XXII"));
        assert_eq!(c4.stabilizer().logical_z()[0], p("IZZI"));
        for name in ["c4", "c12", "c14"] {
            assert!(builtin(name).unwrap().is_dual_rail(), "{name}");
        }
        let c14 = builtin("c14").unwrap();
        assert_eq!(c14.k(), 3);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            StabilizerCode::parse("bad", &["XI", "ZI"], &[], &[]),
            Err(CodeError::NonCommuting { .. })
        ));
        assert!(matches!(
            StabilizerCode::parse("bad", &["ZZ", "-ZZ"], &[], &[]),
            Err(CodeError::Dependent { .. })
        ));
        assert!(matches!(
            StabilizerCode::parse("bad", &["iZZ"], &["XX"], &["ZI"]),
            Err(CodeError::ImaginaryPhase { .. })
        ));
    }

    #[test]
    fn stabilizer_elements_have_zero_syndrome() {
        let c12 = builtin_stabilizer("c12").unwrap();
        let gens = c12.generators();
        for mask in 0u32..(1 << gens.len()) {
            let mut s = Pauli::identity(12);
            for (i, g) in gens.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    s.mul_assign_right(g);
                }
            }
            assert!(c12.syndrome_of(&s).unwrap().is_zero());
            assert!(c12.group().contains(&s));
        }
    }

    // Random CSS codes: X rows from a random matrix, Z rows from a subspace of its dual.
    fn random_css(words: &[u64], n: usize) -> Option<StabilizerCode> {
        let xr: Vec<Bits> = gf2::rref(&words.iter().take(2).map(|&w| Bits::from_u64(n, w)).collect::<Vec<_>>(), n);
        let dual = gf2::nullspace(&xr, n);
        let zr: Vec<Bits> = gf2::rref(
            &words
                .iter()
                .skip(2)
                .map(|&w| {
                    let mut acc = Bits::zeros(n);
                    for (i, d) in dual.iter().enumerate() {
                        if (w >> i) & 1 == 1 {
                            acc ^= d;
                        }
                    }
                    acc
                })
                .collect::<Vec<_>>(),
            n,
        );
        if xr.len() + zr.len() >= n {
            return None;
        }
        let (lx, lz) = derive_css_logicals(n, &xr, &zr);
        let gens: Vec<Pauli> = xr.into_iter().map(Pauli::x_type).chain(zr.into_iter().map(Pauli::z_type)).collect();
        StabilizerCode::new(
            "rand",
            gens,
            lx.into_iter().map(Pauli::x_type).collect(),
            lz.into_iter().map(Pauli::z_type).collect(),
        )
        .ok()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn concatenation_properties(words in proptest::collection::vec(0u64..64, 4), n in 3usize..=6) {
            let masked: Vec<u64> = words.iter().map(|w| w & ((1 << n) - 1)).collect();
            if let Some(code) = random_css(&masked, n) {
                let lifted = dual_rail_concatenate(&code).unwrap().code;
                prop_assert_eq!(lifted.generators().len(), code.generators().len() + n);
                prop_assert_eq!(lifted.k(), code.k());
                prop_assert!(check_ce_necessary(&lifted).holds);
                let css = dual_rail_concatenate_css(&CssCode::from_stabilizer(code.clone()).unwrap()).unwrap();
                let full = check_ce_full(&css).unwrap();
                prop_assert_eq!(full.weight, Some(n));
                let d_in = distance_brute_force(&code, 3);
                let d_out = distance_brute_force(&lifted, 3);
                if let Distance::Exact(d) = d_in {
                    let ok = match d_out { Distance::Exact(e) => e >= d, Distance::GreaterThan(_) => true };
                    prop_assert!(ok);
                }
            }
        }
    }
}
