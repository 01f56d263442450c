//! Fault-tolerant error correction at the Pauli-frame level.
//!
//! A syndrome bit is read through a verified cat state whose qubits each
//! couple to a single data qubit. The s-basis (bit-flip) measurement
//! Hadamards the cat and XORs data into it; the c-basis (phase-flip)
//! measurement XORs the cat into the data and Hadamards the cat afterwards,
//! which avoids transforming the codeword itself.
//!
//! A round for one component does not repeat the whole syndrome. It walks the
//! cycle `v1, v2, v3, v1+v2+v3, v1, ...` (each row the sum of the previous
//! three) until the last four results agree, then decodes from the latest
//! value of each basis row.

use crate::error::{Error, Result};
use crate::pauli_frame::{apply_hadamard, apply_xor, ErrorFlags, NoiseSource};
use crate::steane::{weight, CodeBlock, Component, CssCode, Syndrome};

pub const MAX_CAT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatState {
    qubits: [ErrorFlags; MAX_CAT],
    size: usize,
    pub attempts: u32,
}

impl CatState {
    pub fn qubits(&self) -> &[ErrorFlags] {
        &self.qubits[..self.size]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bit_pattern(&self) -> u8 {
        pattern_of(self.qubits(), |q| q.bit_flip)
    }

    pub fn phase_pattern(&self) -> u8 {
        pattern_of(self.qubits(), |q| q.phase_flip)
    }
}

fn pattern_of(qs: &[ErrorFlags], f: impl Fn(&ErrorFlags) -> bool) -> u8 {
    qs.iter()
        .enumerate()
        .filter(|(_, q)| f(q))
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// Measurement basis of a syndrome bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Looks for bit flips.
    S,
    /// Looks for phase flips.
    C,
}

impl From<Component> for Basis {
    fn from(c: Component) -> Self {
        match c {
            Component::Bit => Basis::S,
            Component::Phase => Basis::C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FtecKind {
    Full,
    /// Abandon the round when the first syndrome bit reads 0.
    OneThird,
    /// `Full` after every single gate.
    PerGateFull,
    /// `OneThird` after every single gate.
    PerGateOneThird,
}

impl FtecKind {
    pub fn early_exit(self) -> bool {
        matches!(self, FtecKind::OneThird | FtecKind::PerGateOneThird)
    }

    pub fn per_gate(self) -> bool {
        matches!(self, FtecKind::PerGateFull | FtecKind::PerGateOneThird)
    }

    pub fn name(self) -> &'static str {
        match self {
            FtecKind::Full => "full",
            FtecKind::OneThird => "one-third",
            FtecKind::PerGateFull => "per-gate-full",
            FtecKind::PerGateOneThird => "per-gate-one-third",
        }
    }
}

impl std::str::FromStr for FtecKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" => FtecKind::Full,
            "one-third" => FtecKind::OneThird,
            "per-gate-full" => FtecKind::PerGateFull,
            "per-gate-one-third" => FtecKind::PerGateOneThird,
            _ => return Err(Error::config(format!("unknown strategy {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FtecStrategy {
    pub kind: FtecKind,
    /// Re-measure instead of accepting when the last four bits read 0,0,1,1.
    pub special_case_guard: bool,
    /// Cap on syndrome-bit measurements per round.
    pub max_rounds: u32,
    /// Cap on cat preparation attempts per syndrome bit.
    pub cat_attempt_cap: u32,
}

impl FtecStrategy {
    pub fn new(kind: FtecKind) -> Self {
        Self {
            kind,
            special_case_guard: true,
            max_rounds: 64,
            cat_attempt_cap: 1000,
        }
    }

    pub fn full() -> Self {
        Self::new(FtecKind::Full)
    }

    pub fn one_third() -> Self {
        Self::new(FtecKind::OneThird)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rounds < 4 {
            return Err(Error::config("max_rounds must be at least 4"));
        }
        if self.cat_attempt_cap == 0 {
            return Err(Error::config("cat_attempt_cap must be positive"));
        }
        Ok(())
    }
}

/// Prepare and verify a `size`-qubit cat, retrying until the verification
/// ancilla reads 0.
pub fn prepare_cat(size: usize, attempt_cap: u32, noise: &mut impl NoiseSource) -> Result<CatState> {
    assert!(
        (2..=MAX_CAT).contains(&size),
        "cat size must be between 2 and {MAX_CAT}"
    );
    for attempt in 1..=attempt_cap {
        let mut cat = CatState {
            qubits: [ErrorFlags::I; MAX_CAT],
            size,
            attempts: attempt,
        };
        let qs = &mut cat.qubits[..size];
        for q in qs.iter_mut() {
            noise.single(q);
        }
        // Hadamard on the first qubit; its flags are basis-definite here
        noise.single(&mut qs[0]);
        for k in 1..size {
            let (head, tail) = qs.split_at_mut(k);
            apply_xor(&mut head[k - 1], &mut tail[0], noise);
        }
        let mut ancilla = ErrorFlags::I;
        noise.single(&mut ancilla);
        apply_xor(&mut qs[0], &mut ancilla, noise);
        apply_xor(&mut qs[size - 1], &mut ancilla, noise);
        noise.single(&mut ancilla);
        if !ancilla.bit_flip {
            return Ok(cat);
        }
    }
    Err(Error::CatPreparation { attempts: attempt_cap })
}

/// Measure the parity of `row` on `block` in the given basis with a fresh
/// cat. Errors propagated into the block stay there.
pub fn measure_syndrome_bit(
    block: &mut CodeBlock,
    row: u8,
    basis: Basis,
    cat_attempt_cap: u32,
    noise: &mut impl NoiseSource,
) -> Result<bool> {
    let size = weight(row) as usize;
    let mut cat = prepare_cat(size, cat_attempt_cap, noise)?;
    let cat_qs = &mut cat.qubits[..size];
    let support = (0..7).filter(|j| row >> j & 1 == 1);
    match basis {
        Basis::S => {
            for q in cat_qs.iter_mut() {
                apply_hadamard(q, noise);
            }
            for (k, j) in support.enumerate() {
                apply_xor(&mut block.qubits[j], &mut cat_qs[k], noise);
            }
        }
        Basis::C => {
            for (k, j) in support.enumerate() {
                apply_xor(&mut cat_qs[k], &mut block.qubits[j], noise);
            }
            for q in cat_qs.iter_mut() {
                apply_hadamard(q, noise);
            }
        }
    }
    let mut outcome = false;
    for q in cat_qs.iter_mut() {
        noise.single(q);
        outcome ^= q.bit_flip;
    }
    Ok(outcome)
}

/// The 0/1-syndrome bit: parity over the weight-3 row, read with a 3-qubit cat.
pub fn measure_zero_one(
    block: &mut CodeBlock,
    code: &CssCode,
    cat_attempt_cap: u32,
    noise: &mut impl NoiseSource,
) -> Result<bool> {
    measure_syndrome_bit(block, code.zero_one_row(), Basis::S, cat_attempt_cap, noise)
}

/// Measured syndrome bits of one round, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyndromeHistory {
    entries: Vec<(usize, bool)>,
}

impl SyndromeHistory {
    /// Index into [`CssCode::cyclic_rows`] of the `m`-th measurement of a round
    /// started at basis row `start`.
    pub fn row_index(start: usize, m: usize) -> usize {
        match m % 4 {
            3 => 3,
            k => (start + k) % 3,
        }
    }

    pub fn push(&mut self, row: usize, bit: bool) {
        self.entries.push((row, bit));
    }

    pub fn entries(&self) -> &[(usize, bool)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn last_four(&self) -> Option<[bool; 4]> {
        let n = self.entries.len();
        (n >= 4).then(|| std::array::from_fn(|i| self.entries[n - 4 + i].1))
    }

    /// XOR of the last four bits; `None` before four measurements.
    pub fn last_four_parity(&self) -> Option<bool> {
        self.last_four().map(|b| b.iter().fold(false, |a, &x| a ^ x))
    }

    /// Consistent and, with the guard on, not the ambiguous 0,0,1,1 pattern.
    pub fn accepts(&self, guard: bool) -> bool {
        match self.last_four() {
            Some(bits) => {
                let parity = bits.iter().fold(false, |a, &x| a ^ x);
                !parity && !(guard && bits == [false, false, true, true])
            }
            None => false,
        }
    }

    /// Syndrome from the latest measurement of each basis row.
    pub fn syndrome(&self) -> Syndrome {
        let mut bits = [false; 3];
        for i in 0..3 {
            bits[i] = self
                .entries
                .iter()
                .rev()
                .find(|(r, _)| *r == i)
                .is_some_and(|&(_, b)| b);
        }
        Syndrome::from_bits(bits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundReport {
    pub history: SyndromeHistory,
    /// Position flipped by the correction, if any.
    pub corrected: Option<usize>,
    pub early_exit: bool,
    /// Hit `max_rounds` without four consistent bits; no correction applied.
    pub aborted: bool,
}

impl RoundReport {
    pub fn measurements(&self) -> usize {
        self.history.len()
    }
}

pub fn ftec_round(
    block: &mut CodeBlock,
    component: Component,
    strategy: &FtecStrategy,
    round_index: u64,
    code: &CssCode,
    noise: &mut impl NoiseSource,
) -> Result<RoundReport> {
    let rows = code.cyclic_rows();
    let start = (round_index % 3) as usize;
    let basis = Basis::from(component);
    let mut history = SyndromeHistory::default();
    let report = |history, corrected, early_exit, aborted| RoundReport {
        history,
        corrected,
        early_exit,
        aborted,
    };

    for m in 0..strategy.max_rounds as usize {
        let row = SyndromeHistory::row_index(start, m);
        let bit = measure_syndrome_bit(block, rows[row], basis, strategy.cat_attempt_cap, noise)?;
        history.push(row, bit);
        if m == 0 && !bit && strategy.kind.early_exit() {
            return Ok(report(history, None, true, false));
        }
        if history.accepts(strategy.special_case_guard) {
            let corrected = code.decode(history.syndrome());
            if let Some(z) = corrected {
                let q = &mut block.qubits[z];
                component.flip(q);
                noise.single(q);
            }
            return Ok(report(history, corrected, false, false));
        }
    }
    Ok(report(history, None, false, true))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryReport {
    pub bit: RoundReport,
    pub phase: RoundReport,
}

impl RecoveryReport {
    pub fn aborted(&self) -> bool {
        self.bit.aborted || self.phase.aborted
    }
}

/// Bit-flip round followed by phase-flip round.
pub fn full_recovery(
    block: &mut CodeBlock,
    strategy: &FtecStrategy,
    round_index: u64,
    code: &CssCode,
    noise: &mut impl NoiseSource,
) -> Result<RecoveryReport> {
    let bit = ftec_round(block, Component::Bit, strategy, round_index, code, noise)?;
    let phase = ftec_round(block, Component::Phase, strategy, round_index, code, noise)?;
    Ok(RecoveryReport { bit, phase })
}
