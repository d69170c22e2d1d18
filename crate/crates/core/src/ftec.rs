//! Two-round error correction with lookup-table decoding.
//!
//! Round 1 is always run. A nonzero round-1 syndrome triggers round 2, whose
//! syndrome selects the correction. The data frame and any coherent records
//! carry over between rounds; ancillas are freshly prepared each round.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::bits::{Bits, Hex};
use crate::circuit::{insert_cc_layers, Location};
use crate::code::{distance_brute_force, CodeError, CssCode, Distance, StabilizerGroup};
use crate::extraction::{ExtractionRound, OutcomeMode};
use crate::frame::{finalize_records, Calibration, FrameError, FrameSimulator, OverlapPolicy, SimState};
use crate::gf2;
use crate::noise::{Fault, FaultAssignment};
use crate::pauli::{Letter, Pauli, Phase};

#[derive(Debug, Clone, PartialEq)]
pub enum FtecError {
    Frame(FrameError),
    Code(CodeError),
    LogicalCollision(Box<CollisionCertificate>),
    RoundMismatch { code: String, round: String },
    TableEntry { syndrome: Bits, correction: Pauli },
}

impl fmt::Display for FtecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Frame(e) => write!(f, "{e}"),
            Self::Code(e) => write!(f, "{e}"),
            Self::LogicalCollision(c) => write!(f, "{c}"),
            Self::RoundMismatch { code, round } => write!(f, "round built for {round}, code is {code}"),
            Self::TableEntry { syndrome, correction } => {
                write!(f, "correction {correction} does not have syndrome {}", Hex(syndrome))
            }
        }
    }
}

impl core::error::Error for FtecError {}

impl From<FrameError> for FtecError {
    fn from(e: FrameError) -> Self {
        Self::Frame(e)
    }
}

impl From<CodeError> for FtecError {
    fn from(e: CodeError) -> Self {
        Self::Code(e)
    }
}

/// Two single events with the same round-2 syndrome whose residuals differ
/// by a logical operator.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionCertificate {
    pub syndrome: Bits,
    pub first: Event,
    pub first_residual: Pauli,
    pub second: Event,
    pub second_residual: Pauli,
}

impl fmt::Display for CollisionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "logical collision at syndrome {}: {} leaves {}, {} leaves {}",
            Hex(&self.syndrome),
            self.first,
            self.first_residual,
            self.second,
            self.second_residual
        )
    }
}

/// What went wrong in a single-event scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Input(Pauli),
    Fault { round: u8, location: Location, fault: Fault },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Input(p) => write!(f, "input {p}"),
            Self::Fault { round, location, fault } => write!(
                f,
                "round {round} layer {} {:?} on {:?}: {}",
                location.layer,
                location.kind,
                location.qubits,
                fault_label(fault)
            ),
        }
    }
}

pub fn fault_label(f: &Fault) -> String {
    match f {
        Fault::Pauli1(l) => format!("{}", l.as_char()),
        Fault::Pauli2(a, b) => format!("{}{}", a.as_char(), b.as_char()),
        Fault::MeasFlip => String::from("flip"),
    }
}

/// Where a table entry came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Identity,
    /// A weight-1 input or a single round-1 fault.
    Single(Event),
    /// A weight-1 input together with one fault.
    InputAndFault { input: Pauli, fault: Event },
    MinimumWeight,
    /// Read from a file.
    Loaded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub correction: Pauli,
    pub origin: Origin,
}

/// Round-2 syndrome to data correction.
///
/// Entries fixed by single events or by minimum weight carry their keyed
/// syndrome. An entry fixed by an input-plus-fault pair may not: when the
/// fault flipped a syndrome bit, the right correction undoes the input and
/// the fault's data error rather than the observed syndrome.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeTable {
    n: usize,
    n_generators: usize,
    entries: BTreeMap<Bits, TableEntry>,
}

impl SyndromeTable {
    pub fn new(n: usize, n_generators: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(
            Bits::zeros(n_generators),
            TableEntry { correction: Pauli::identity(n), origin: Origin::Identity },
        );
        Self { n, n_generators, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_generators(&self) -> usize {
        self.n_generators
    }

    pub fn insert(&mut self, syndrome: Bits, correction: Pauli, origin: Origin) -> Result<(), FtecError> {
        if syndrome.len() != self.n_generators
            || correction.len() != self.n
            || (syndrome.is_zero() && !correction.is_identity_body())
        {
            return Err(FtecError::TableEntry { syndrome, correction });
        }
        self.entries.insert(syndrome, TableEntry { correction, origin });
        Ok(())
    }

    pub fn get(&self, syndrome: &Bits) -> Option<&Pauli> {
        self.entries.get(syndrome).map(|e| &e.correction)
    }

    pub fn entry(&self, syndrome: &Bits) -> Option<&TableEntry> {
        self.entries.get(syndrome)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.n_generators < usize::BITS as usize && self.entries.len() == 1usize << self.n_generators
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bits, &TableEntry)> {
        self.entries.iter()
    }

    /// Entries whose correction does not have the keyed syndrome, other
    /// than those set by an input-plus-fault pair.
    pub fn inconsistent_entries<'a>(&'a self, code: &'a CssCode) -> impl Iterator<Item = &'a Bits> + 'a {
        self.entries.iter().filter_map(move |(s, e)| {
            let pair = matches!(e.origin, Origin::InputAndFault { .. });
            (!pair && code.stabilizer().syndrome_unchecked(&e.correction) != *s).then_some(s)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    Success,
    LogicalFailure,
}

/// Ideal decoding: the lowest-weight correction of weight at most `t` for
/// the residual's syndrome, then a stabilizer-membership test. Membership
/// ignores phases, since a frame's phase is only a global phase.
#[derive(Debug, Clone)]
pub struct PerfectDecoder {
    code: CssCode,
    group: StabilizerGroup,
    t: usize,
    corrections: BTreeMap<Bits, Pauli>,
}

impl PerfectDecoder {
    pub fn new(code: &CssCode, t: usize) -> Self {
        let n = code.n();
        let mut corrections = BTreeMap::new();
        corrections.insert(Bits::zeros(code.generators().len()), Pauli::identity(n));
        if t >= 1 {
            for q in 0..n {
                for l in Letter::NON_IDENTITY {
                    let p = Pauli::single(n, q, l);
                    corrections.entry(code.stabilizer().syndrome_unchecked(&p)).or_insert(p);
                }
            }
        }
        Self { code: code.clone(), group: code.stabilizer().group(), t: t.min(1), corrections }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn correction_for(&self, syndrome: &Bits) -> Option<&Pauli> {
        self.corrections.get(syndrome)
    }

    /// Whether the syndrome is that of some Pauli of weight at most `t`.
    pub fn within_t(&self, syndrome: &Bits) -> bool {
        self.corrections.contains_key(syndrome)
    }

    pub fn decode(&self, residual: &Pauli) -> DecodeOutcome {
        let s = self.code.stabilizer().syndrome_unchecked(residual);
        match self.corrections.get(&s) {
            Some(c) if self.group.contains_up_to_phase(&residual.mul(c)) => DecodeOutcome::Success,
            _ => DecodeOutcome::LogicalFailure,
        }
    }
}

/// Perfect decoding with weight-one corrections.
pub fn perfect_decode(code: &CssCode, residual: &Pauli) -> DecodeOutcome {
    PerfectDecoder::new(code, 1).decode(residual)
}

/// `⌊(d−1)/2⌋`, capped at 1.
pub fn correctable_weight(code: &CssCode) -> usize {
    match distance_brute_force(code.stabilizer(), 3) {
        Distance::Exact(d) if d < 3 => 0,
        _ => 1,
    }
}

/// Data error and syndrome flips left by one fault in one clean round.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultEffect {
    pub location_index: u32,
    pub location: Location,
    pub fault: Fault,
    pub data: Pauli,
    pub syndrome: Bits,
}

/// Every (location, fault value) pair of one round, in location order.
pub fn single_fault_effects(round: &ExtractionRound) -> Result<Vec<FaultEffect>, FtecError> {
    let sim = FrameSimulator::new(&round.circuit);
    let mut rng = crate::noise::trial_rng(0, 0);
    let mut out = Vec::new();
    for (i, loc) in sim.locations().iter().enumerate() {
        for fault in Fault::all_for(loc.kind) {
            let s = sim.simulate(&FaultAssignment::single(i, fault), &mut rng)?;
            out.push(FaultEffect {
                location_index: i as u32,
                location: *loc,
                fault,
                data: s.data_error(round.n_data),
                syndrome: round.syndrome(&s.outcomes, OutcomeMode::Frame),
            });
        }
    }
    Ok(out)
}

fn check_round(code: &CssCode, round: &ExtractionRound) -> Result<(), FtecError> {
    if round.n_data != code.n() || round.n_generators() != code.generators().len() {
        return Err(FtecError::RoundMismatch { code: code.name().into(), round: round.code_name.clone() });
    }
    Ok(())
}

/// Syndromes of all Paulis of weight at most one.
fn weight_one_syndromes(code: &CssCode) -> BTreeSet<Bits> {
    let n = code.n();
    let mut out = BTreeSet::new();
    out.insert(Bits::zeros(code.generators().len()));
    for q in 0..n {
        for l in Letter::NON_IDENTITY {
            out.insert(code.stabilizer().syndrome_unchecked(&Pauli::single(n, q, l)));
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Constraint {
    /// Output must decode perfectly.
    Correctable,
    /// Output must lie within weight one of some codeword.
    Spread,
}

struct Member {
    constraint: Constraint,
    input: Option<usize>,
    effect: Option<(u8, usize)>,
    residual: Pauli,
    residual_syndrome: Bits,
}

/// Precomputes a correction for every syndrome.
///
/// Three tiers, in priority order:
/// 1. Syndromes reached by a single event (a weight-1 input with a clean
///    protocol, or one round-1 fault with a clean input). The correction
///    must make every such event decode perfectly; events whose residuals
///    differ by a logical operator abort the build with a certificate.
/// 2. Syndromes reached by a weight-1 input plus one fault. The correction
///    is chosen so that every such output lies within weight one of a
///    codeword.
/// 3. Everything else gets a minimum-weight X part and Z part chosen
///    independently.
///
/// Candidates in tiers 1 and 2 are a member's residual times a Pauli of
/// weight at most one.
pub fn build_lookup_table(code: &CssCode, round: &ExtractionRound) -> Result<SyndromeTable, FtecError> {
    check_round(code, round)?;
    let t = correctable_weight(code);
    let effects = single_fault_effects(round)?;
    build_table_from_effects(code, &effects, t)
}

fn build_table_from_effects(code: &CssCode, effects: &[FaultEffect], t: usize) -> Result<SyndromeTable, FtecError> {
    let n = code.n();
    let m = code.generators().len();
    let stab = code.stabilizer();
    let group = stab.group();
    let decoder = PerfectDecoder::new(code, t);
    let w1 = weight_one_syndromes(code);
    let singles: Vec<Pauli> = (0..n)
        .flat_map(|q| Letter::NON_IDENTITY.into_iter().map(move |l| Pauli::single(n, q, l)))
        .collect();
    let single_syn: Vec<Bits> = singles.iter().map(|p| stab.syndrome_unchecked(p)).collect();
    let effect_syn: Vec<Bits> = effects.iter().map(|e| stab.syndrome_unchecked(&e.data)).collect();

    let mut members: BTreeMap<Bits, Vec<Member>> = BTreeMap::new();
    let mut add = |key: Bits, constraint, input: Option<usize>, effect: Option<(u8, usize)>| {
        let mut residual = input.map_or_else(|| Pauli::identity(n), |i| singles[i].clone());
        let mut rs = input.map_or_else(|| Bits::zeros(m), |i| single_syn[i].clone());
        if let Some((_, e)) = effect {
            residual = residual.mul(&effects[e].data);
            rs ^= &effect_syn[e];
        }
        members.entry(key).or_default().push(Member { constraint, input, effect, residual, residual_syndrome: rs });
    };
    let tier1 = if t >= 1 { Constraint::Correctable } else { Constraint::Spread };
    if t >= 1 {
        for (i, s) in single_syn.iter().enumerate() {
            add(s.clone(), tier1, Some(i), None);
        }
    }
    for (e, eff) in effects.iter().enumerate() {
        if !eff.syndrome.is_zero() {
            add(effect_syn[e].clone(), tier1, None, Some((1, e)));
        }
    }
    for (i, si) in single_syn.iter().enumerate() {
        for (e, eff) in effects.iter().enumerate() {
            // Fault in round 2 after a clean round 1.
            add(si.xor(&eff.syndrome), Constraint::Spread, Some(i), Some((2, e)));
            // Fault in round 1; round 2 then reads the data faithfully.
            if !si.xor(&eff.syndrome).is_zero() {
                add(si.xor(&effect_syn[e]), Constraint::Spread, Some(i), Some((1, e)));
            }
        }
    }

    let event_of = |mb: &Member| -> Event {
        match (mb.input, mb.effect) {
            (_, Some((r, e))) => Event::Fault { round: r, location: effects[e].location, fault: effects[e].fault },
            (Some(i), None) => Event::Input(singles[i].clone()),
            (None, None) => Event::Input(Pauli::identity(n)),
        }
    };

    let mut table = SyndromeTable::new(n, m);
    for (key, list) in &members {
        if key.is_zero() {
            // Identity is forced; the checker reports any fallout.
            continue;
        }
        let mut bases: Vec<&Member> = list.iter().filter(|mb| mb.constraint == Constraint::Correctable).collect();
        if bases.is_empty() {
            bases = list.iter().collect();
        }
        let mut seen: Vec<Bits> = Vec::new();
        let mut candidates: Vec<(Pauli, Bits, usize)> = Vec::new();
        for (bi, b) in bases.iter().enumerate() {
            let sym = b.residual.symplectic();
            if seen.iter().any(|s| group.contains_up_to_phase(&Pauli::from_symplectic(&s.xor(&sym)))) {
                continue;
            }
            seen.push(sym);
            if seen.len() > 6 {
                break;
            }
            candidates.push((b.residual.clone().with_phase(Phase::PlusOne), b.residual_syndrome.clone(), bi));
            for (w, ws) in singles.iter().zip(&single_syn) {
                candidates.push((b.residual.mul(w).with_phase(Phase::PlusOne), b.residual_syndrome.xor(ws), bi));
            }
        }
        let score = |c: &Pauli, cs: &Bits| -> (bool, usize, bool, core::cmp::Reverse<usize>) {
            let mut a_ok = true;
            let mut spread_ok = 0;
            for mb in list {
                let out_syn = mb.residual_syndrome.xor(cs);
                match mb.constraint {
                    Constraint::Correctable => {
                        if decoder.decode(&mb.residual.mul(c)) != DecodeOutcome::Success {
                            a_ok = false;
                        }
                    }
                    Constraint::Spread => spread_ok += w1.contains(&out_syn) as usize,
                }
            }
            (a_ok, spread_ok, cs == key, core::cmp::Reverse(c.weight()))
        };
        let (best, best_score) = candidates
            .iter()
            .map(|(c, cs, bi)| ((c, *bi), score(c, cs)))
            .max_by(|a, b| a.1.cmp(&b.1))
            .expect("candidates");
        if !best_score.0 {
            let a_members: Vec<&Member> = list.iter().filter(|mb| mb.constraint == Constraint::Correctable).collect();
            let anchor = a_members[0];
            let other = a_members
                .iter()
                .find(|mb| !group.contains_up_to_phase(&mb.residual.mul(&anchor.residual)))
                .unwrap_or(&a_members[a_members.len() - 1]);
            return Err(FtecError::LogicalCollision(Box::new(CollisionCertificate {
                syndrome: key.clone(),
                first: event_of(anchor),
                first_residual: anchor.residual.clone(),
                second: event_of(other),
                second_residual: other.residual.clone(),
            })));
        }
        let source = bases[best.1];
        let origin = match (source.input, source.effect) {
            (Some(i), Some(_)) => Origin::InputAndFault { input: singles[i].clone(), fault: event_of(source) },
            _ => Origin::Single(event_of(source)),
        };
        table.insert(key.clone(), best.0.clone(), origin)?;
    }
    fill_minimum_weight(code, &mut table)?;
    Ok(table)
}

fn fill_minimum_weight(code: &CssCode, table: &mut SyndromeTable) -> Result<(), FtecError> {
    let n = code.n();
    let gens = code.generators();
    let m = gens.len();
    let x_rows: Vec<(usize, Bits)> = code.x_rows().iter().map(|&i| (i, gens[i].x().clone())).collect();
    let z_rows: Vec<(usize, Bits)> = code.z_rows().iter().map(|&i| (i, gens[i].z().clone())).collect();
    // Z-type generators see X errors and vice versa.
    let best_x = min_weight_by_syndrome(n, &z_rows, m);
    let best_z = min_weight_by_syndrome(n, &x_rows, m);
    for (sx, x) in &best_x {
        for (sz, z) in &best_z {
            let s = sx.xor(sz);
            if table.get(&s).is_some() {
                continue;
            }
            let p = Pauli::from_parts(Phase::PlusOne, x.clone(), z.clone()).expect("lengths");
            table.insert(s, p, Origin::MinimumWeight)?;
        }
    }
    Ok(())
}

/// For each reachable syndrome on `rows`, a lowest-weight vector producing it.
fn min_weight_by_syndrome(n: usize, rows: &[(usize, Bits)], m: usize) -> BTreeMap<Bits, Bits> {
    let syndrome = |v: &Bits| {
        let mut s = Bits::zeros(m);
        for (i, r) in rows {
            if r.dot(v) {
                s.set(*i, true);
            }
        }
        s
    };
    let mut out: BTreeMap<Bits, Bits> = BTreeMap::new();
    if n <= 20 {
        let mut order: Vec<u32> = (0..1u32 << n).collect();
        order.sort_by_key(|v| (v.count_ones(), *v));
        for v in order {
            let b = Bits::from_u64(n, v as u64);
            out.entry(syndrome(&b)).or_insert(b);
        }
    } else {
        // One solution per unit syndrome, then all combinations.
        let mats: Vec<Bits> = rows.iter().map(|(_, r)| r.clone()).collect();
        let mut basis = Vec::new();
        for k in 0..rows.len() {
            let rhs: Vec<bool> = (0..rows.len()).map(|j| j == k).collect();
            if let Some(v) = gf2::solve_dot_system(&mats, &rhs, n) {
                basis.push(v);
            }
        }
        for v in gf2::span(&basis, n) {
            out.entry(syndrome(&v)).or_insert(v);
        }
    }
    out
}

/// Result of one protocol execution.
#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub rounds: u8,
    pub syndrome1: Bits,
    pub syndrome2: Option<Bits>,
    pub correction: Pauli,
    pub unknown_syndrome: bool,
    pub state: SimState,
}

#[derive(Debug, Clone)]
pub struct Ftec {
    code: CssCode,
    round: ExtractionRound,
    sim: FrameSimulator,
    table: SyndromeTable,
    decoder: PerfectDecoder,
}

impl Ftec {
    pub fn new(code: &CssCode, round: &ExtractionRound) -> Result<Self, FtecError> {
        let table = build_lookup_table(code, round)?;
        Self::with_table(code, round, table)
    }

    pub fn with_table(code: &CssCode, round: &ExtractionRound, table: SyndromeTable) -> Result<Self, FtecError> {
        Self::with_options(code, round, table, Calibration::DERIVED)
    }

    pub fn with_options(
        code: &CssCode,
        round: &ExtractionRound,
        table: SyndromeTable,
        calibration: Calibration,
    ) -> Result<Self, FtecError> {
        check_round(code, round)?;
        let circuit = insert_cc_layers(&round.circuit);
        let sim = FrameSimulator::with_options(&circuit, calibration, OverlapPolicy::Sequential);
        let t = correctable_weight(code);
        Ok(Self { code: code.clone(), round: round.clone(), sim, table, decoder: PerfectDecoder::new(code, t) })
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn round(&self) -> &ExtractionRound {
        &self.round
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    pub fn decoder(&self) -> &PerfectDecoder {
        &self.decoder
    }

    /// The simulator runs the round with one CC slot per layer; CC acts only
    /// when the fault assignment carries phases.
    pub fn simulator(&self) -> &FrameSimulator {
        &self.sim
    }

    /// Algorithm run on `input` (data frame before round 1), with faults
    /// `f1` in round 1 and `f2` in round 2.
    pub fn run<R: Rng>(
        &self,
        input: Option<&Pauli>,
        f1: &FaultAssignment,
        f2: &FaultAssignment,
        rng: &mut R,
    ) -> Result<ProtocolTrace, FtecError> {
        let mut state = SimState::new(self.sim.n_qubits());
        if let Some(p) = input {
            state.apply_pauli(p)?;
        }
        self.sim.run(&mut state, f1, rng, None)?;
        let syndrome1 = self.round.syndrome(&state.outcomes, OutcomeMode::Frame);
        let n = self.code.n();
        if syndrome1.is_zero() {
            return Ok(ProtocolTrace {
                rounds: 1,
                syndrome1,
                syndrome2: None,
                correction: Pauli::identity(n),
                unknown_syndrome: false,
                state,
            });
        }
        self.sim.run(&mut state, f2, rng, None)?;
        let s2 = self.round.syndrome(&state.outcomes, OutcomeMode::Frame);
        let (correction, unknown) = match self.table.get(&s2) {
            Some(c) => (c.clone(), false),
            None => (Pauli::identity(n), true),
        };
        state.apply_pauli(&correction)?;
        Ok(ProtocolTrace { rounds: 2, syndrome1, syndrome2: Some(s2), correction, unknown_syndrome: unknown, state })
    }

    /// Collapses leftover records and decodes ideally.
    pub fn finish<R: Rng>(&self, trace: &mut ProtocolTrace, rng: &mut R) -> DecodeOutcome {
        finalize_records(&mut trace.state, rng);
        self.decoder.decode(&trace.state.data_error(self.code.n()))
    }
}

/// Convenience wrapper: one protocol execution with a clean input.
pub fn run_ftec<R: Rng>(
    ftec: &Ftec,
    f1: &FaultAssignment,
    f2: &FaultAssignment,
    rng: &mut R,
) -> Result<(Pauli, ProtocolTrace), FtecError> {
    let t = ftec.run(None, f1, f2, rng)?;
    Ok((t.correction.clone(), t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Correctable-output condition broken.
    ViolatesA,
    /// Bounded-spread condition broken.
    ViolatesB,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::ViolatesA => "violates-a",
            Self::ViolatesB => "violates-b",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtecRecord {
    /// 0 for input-only scenarios.
    pub round: u8,
    pub location: Option<Location>,
    pub fault: Option<Fault>,
    /// `None` stands for an arbitrary input (checked by linearity).
    pub input: Option<Pauli>,
    pub syndrome2: Option<Bits>,
    pub residual: Pauli,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtecReport {
    pub code: String,
    pub method: &'static str,
    pub t: usize,
    /// Records for every single fault with a clean input, every weight-1
    /// input with a clean protocol, and every violation found.
    pub records: Vec<FtecRecord>,
    pub runs: u64,
    pub violations_a: u64,
    pub violations_b: u64,
    /// Part of `violations_b` that needs a nonzero input together with a
    /// protocol fault.
    pub violations_b_with_input: u64,
}

impl FtecReport {
    pub fn is_fault_tolerant(&self) -> bool {
        self.violations_a == 0 && self.violations_b == 0
    }

    pub fn violations(&self) -> impl Iterator<Item = &FtecRecord> {
        self.records.iter().filter(|r| r.status != Status::Ok)
    }
}

/// Exhaustive check of both fault-tolerance conditions for single faults.
///
/// Every single fault in either round is run through the full protocol with
/// a clean input and with each weight-1 input, as is every weight-1 input
/// with a clean protocol. The spread condition is tested on the syndrome of
/// the output, so "within weight one of a codeword" allows any logical
/// state.
pub fn verify_fault_tolerance(code: &CssCode, round: &ExtractionRound) -> Result<FtecReport, FtecError> {
    let ftec = Ftec::new(code, round)?;
    verify_with(&ftec)
}

pub fn verify_with(ftec: &Ftec) -> Result<FtecReport, FtecError> {
    let code = ftec.code();
    let n = code.n();
    let t = ftec.decoder().t();
    let spread = PerfectDecoder::new(code, 1);
    let stab = code.stabilizer();
    let mut rng = crate::noise::trial_rng(0, 0);
    let effects = single_fault_effects(ftec.round())?;
    let mut report = FtecReport {
        code: code.name().into(),
        method: ftec.round().method.as_str(),
        t,
        records: Vec::new(),
        runs: 0,
        violations_a: 0,
        violations_b: 0,
        violations_b_with_input: 0,
    };
    let clean = FaultAssignment::none();
    let mut inputs: Vec<Option<Pauli>> = alloc::vec![None];
    for q in 0..n {
        for l in Letter::NON_IDENTITY {
            inputs.push(Some(Pauli::single(n, q, l)));
        }
    }
    // (weight-1 input or nothing) with a clean protocol
    for input in &inputs {
        let tr = ftec.run(input.as_ref(), &clean, &clean, &mut rng)?;
        report.runs += 1;
        let residual = tr.state.data_error(n);
        let weight = input.is_some() as usize;
        let status = if weight <= t && ftec.decoder().decode(&residual) != DecodeOutcome::Success {
            Status::ViolatesA
        } else if !stab.syndrome_unchecked(&residual).is_zero() {
            Status::ViolatesB
        } else {
            Status::Ok
        };
        push(&mut report, 0, None, None, input.clone(), tr.syndrome2, residual, status);
    }
    for e in &effects {
        for round in [1u8, 2] {
            let single = FaultAssignment::single(e.location_index as usize, e.fault);
            for input in &inputs {
                let (f1, f2) = if round == 1 { (&single, &clean) } else { (&clean, &single) };
                let tr = ftec.run(input.as_ref(), f1, f2, &mut rng)?;
                report.runs += 1;
                let residual = tr.state.data_error(n);
                let a_applies = input.is_none() && t >= 1;
                let status = if a_applies && ftec.decoder().decode(&residual) != DecodeOutcome::Success {
                    Status::ViolatesA
                } else if !spread.within_t(&stab.syndrome_unchecked(&residual)) {
                    Status::ViolatesB
                } else {
                    Status::Ok
                };
                if input.is_none() || status != Status::Ok {
                    push(&mut report, round, Some(e.location), Some(e.fault), input.clone(), tr.syndrome2, residual, status);
                }
            }
        }
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn push(
    r: &mut FtecReport,
    round: u8,
    location: Option<Location>,
    fault: Option<Fault>,
    input: Option<Pauli>,
    syndrome2: Option<Bits>,
    residual: Pauli,
    status: Status,
) {
    match status {
        Status::ViolatesA => r.violations_a += 1,
        Status::ViolatesB => {
            r.violations_b += 1;
            if input.is_some() && fault.is_some() {
                r.violations_b_with_input += 1;
            }
        }
        Status::Ok => {}
    }
    r.records.push(FtecRecord { round, location, fault, input, syndrome2, residual, status });
}

/// Round-2 syndromes for which no correction at all keeps every
/// (weight-1 input, single round-2 fault) pair within weight one of a
/// codeword. A nonempty result means condition (b) with arbitrary input
/// cannot hold for any table driven by the round-2 syndrome.
pub fn spread_conflicts(code: &CssCode, round: &ExtractionRound) -> Result<Vec<Bits>, FtecError> {
    let n = code.n();
    let stab = code.stabilizer();
    let w1 = weight_one_syndromes(code);
    let effects = single_fault_effects(round)?;
    let mut members: BTreeMap<Bits, BTreeSet<Bits>> = BTreeMap::new();
    for q in 0..n {
        for l in Letter::NON_IDENTITY {
            let s = stab.syndrome_unchecked(&Pauli::single(n, q, l));
            for e in &effects {
                let residual = s.xor(&stab.syndrome_unchecked(&e.data));
                members.entry(s.xor(&e.syndrome)).or_default().insert(residual);
            }
        }
    }
    // Corrections only matter through their syndrome; shifting every
    // residual by it has to land each one inside W1.
    let feasible = |list: &BTreeSet<Bits>| {
        let first = list.iter().next().expect("nonempty");
        w1.iter().any(|w| {
            let shift = first.xor(w);
            list.iter().all(|r| w1.contains(&r.xor(&shift)))
        })
    };
    Ok(members.into_iter().filter(|(_, list)| !feasible(list)).map(|(k, _)| k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::builtin;
    use crate::extraction::{build_shor_round, build_steane_round};
    use crate::noise::{trial_rng, CcPhases};

    fn c12() -> CssCode {
        builtin("c12").unwrap()
    }

    #[test]
    fn decode_examples() {
        let code = c12();
        let n = 12;
        assert_eq!(perfect_decode(&code, &Pauli::identity(n)), DecodeOutcome::Success);
        for g in code.generators() {
            assert_eq!(perfect_decode(&code, g), DecodeOutcome::Success);
        }
        let zbar: Pauli = "IIIIIIZIZIIZ".parse().unwrap();
        assert_eq!(perfect_decode(&code, &zbar), DecodeOutcome::LogicalFailure);
        assert_eq!(perfect_decode(&code, &"XIIIIIIIIIII".parse().unwrap()), DecodeOutcome::Success);
    }

    #[test]
    fn table_entries() {
        let code = c12();
        let round = build_shor_round(&code).unwrap();
        let table = build_lookup_table(&code, &round).unwrap();
        assert!(table.is_complete());
        assert!(table.get(&Bits::zeros(11)).unwrap().is_identity_body());
        let z1: Pauli = "ZIIIIIIIIIII".parse().unwrap();
        let s = code.syndrome_of(&z1).unwrap();
        // Only the first generator has an X on qubit 1.
        let expect: Vec<usize> =
            code.generators().iter().enumerate().filter(|(_, g)| g.x().get(0)).map(|(i, _)| i).collect();
        assert_eq!(s.ones_iter().collect::<Vec<_>>(), expect);
        assert_eq!(expect, [0]);
        let c = table.get(&s).unwrap();
        assert!(code.stabilizer().group().contains_up_to_phase(&c.mul(&z1)));
        assert_eq!(table.inconsistent_entries(&code).count(), 0);
    }

    /// Re-running the event behind each entry reproduces its key.
    #[test]
    fn table_self_consistency() {
        let code = c12();
        let round = build_shor_round(&code).unwrap();
        let ftec = Ftec::new(&code, &round).unwrap();
        let locs = ftec.simulator().locations().to_vec();
        let mut rng = trial_rng(0, 0);
        let none = FaultAssignment::none();
        let mut checked = 0;
        for (key, entry) in ftec.table().iter() {
            let (input, fault) = match &entry.origin {
                Origin::Single(Event::Input(p)) => (Some(p.clone()), None),
                Origin::Single(Event::Fault { round, location, fault }) => (None, Some((*round, *location, *fault))),
                Origin::InputAndFault { input, fault: Event::Fault { round, location, fault } } => {
                    (Some(input.clone()), Some((*round, *location, *fault)))
                }
                _ => continue,
            };
            let single = fault.map(|(r, loc, f)| (r, FaultAssignment::single(locs.iter().position(|l| *l == loc).unwrap(), f)));
            let (f1, f2) = match &single {
                Some((1, f)) => (f, &none),
                Some((_, f)) => (&none, f),
                None => (&none, &none),
            };
            let tr = ftec.run(input.as_ref(), f1, f2, &mut rng).unwrap();
            assert_eq!(tr.syndrome2.as_ref(), Some(key));
            checked += 1;
        }
        assert!(checked > 36);
    }

    #[test]
    fn protocol_examples() {
        let code = c12();
        let round = build_shor_round(&code).unwrap();
        let ftec = Ftec::new(&code, &round).unwrap();
        let mut rng = trial_rng(3, 0);
        let none = FaultAssignment::none();
        let tr = ftec.run(None, &none, &none, &mut rng).unwrap();
        assert_eq!(tr.rounds, 1);
        assert!(tr.correction.is_identity_body());
        let x1: Pauli = "XIIIIIIIIIII".parse().unwrap();
        let tr = ftec.run(Some(&x1), &none, &none, &mut rng).unwrap();
        assert_eq!(tr.rounds, 2);
        assert!(code.stabilizer().group().contains_up_to_phase(&tr.correction.mul(&x1)));
        let locs = ftec.simulator().locations();
        let flip = locs.iter().position(|l| l.kind == crate::circuit::LocationKind::Meas).unwrap();
        let tr = ftec.run(None, &FaultAssignment::single(flip, Fault::MeasFlip), &none, &mut rng).unwrap();
        assert_eq!(tr.rounds, 2);
        assert!(tr.syndrome2.unwrap().is_zero());
        assert!(tr.correction.is_identity_body());
    }

    #[test]
    fn zero_faults_identity_over_many_seeds() {
        let code = builtin("c4").unwrap();
        let round = build_shor_round(&code).unwrap();
        let ftec = Ftec::new(&code, &round).unwrap();
        let f = FaultAssignment { faults: alloc::vec![], cc: CcPhases::Uniform(0.0) };
        for seed in 0..10_000u64 {
            let mut rng = trial_rng(seed, 0);
            let f = FaultAssignment { cc: CcPhases::Uniform(rng.gen::<f64>() * 6.0), ..f.clone() };
            let (c, tr) = run_ftec(&ftec, &f, &f, &mut rng).unwrap();
            assert!(c.is_identity_body());
            assert_eq!(tr.rounds, 1);
        }
    }

    #[test]
    fn c12_shor_single_faults() {
        let code = c12();
        let round = build_shor_round(&code).unwrap();
        let report = verify_fault_tolerance(&code, &round).unwrap();
        assert_eq!(report.t, 1);
        // Every violation pairs a weight-1 input with a fault, and those are
        // forced by conflicting round-2 syndromes.
        assert_eq!(report.violations_a, 0);
        assert_eq!(report.violations_b, report.violations_b_with_input);
        assert!(report.violations_b > 0);
        let conflicts = spread_conflicts(&code, &round).unwrap();
        assert!(!conflicts.is_empty());
        for v in report.violations().filter(|v| v.round == 2) {
            assert!(conflicts.contains(v.syndrome2.as_ref().unwrap()), "{v:?}");
        }
    }

    #[test]
    fn packed_shor_corrects_single_faults() {
        let code = c12();
        let round = crate::extraction::build_shor_round_with(&code, crate::extraction::ShorSchedule::Packed).unwrap();
        let report = verify_fault_tolerance(&code, &round).unwrap();
        assert_eq!(report.violations_a, 0);
        assert_eq!(report.violations_b, report.violations_b_with_input);
    }

    #[test]
    fn steane_has_no_spread_conflicts() {
        let code = c12();
        assert!(spread_conflicts(&code, &build_steane_round(&code).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn c12_steane_is_fault_tolerant() {
        let code = c12();
        let report = verify_fault_tolerance(&code, &build_steane_round(&code).unwrap()).unwrap();
        let v: Vec<_> = report.violations().take(3).collect();
        assert!(report.is_fault_tolerant(), "{v:?}");
    }

    #[test]
    fn c4_satisfies_bounded_spread() {
        let code = builtin("c4").unwrap();
        let report = verify_fault_tolerance(&code, &build_shor_round(&code).unwrap()).unwrap();
        assert_eq!(report.t, 0);
        assert_eq!(report.violations_b, 0);
        assert_eq!(report.violations_a, 0);
    }
}

