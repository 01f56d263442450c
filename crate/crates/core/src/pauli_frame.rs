//! Pauli-frame error tracking under gate-level depolarizing noise.
//!
//! Each qubit carries two classical bits: a bit-flip flag and a phase-flip
//! flag. A Hadamard exchanges them, an XOR copies the source's bit flip onto
//! the target and the target's phase flip onto the source. Every gate is
//! followed by a noise event that, with probability `P = 4ε/3`, XORs each flag
//! it touches with a fresh fair bit.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Error state of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ErrorFlags {
    pub bit_flip: bool,
    pub phase_flip: bool,
}

impl ErrorFlags {
    pub const I: Self = Self::new(false, false);
    pub const X: Self = Self::new(true, false);
    pub const Z: Self = Self::new(false, true);
    pub const Y: Self = Self::new(true, true);

    pub const ALL: [Self; 4] = [Self::I, Self::X, Self::Z, Self::Y];

    pub const fn new(bit_flip: bool, phase_flip: bool) -> Self {
        Self { bit_flip, phase_flip }
    }

    /// `bit_flip` in bit 0, `phase_flip` in bit 1.
    pub const fn index(self) -> usize {
        self.bit_flip as usize | (self.phase_flip as usize) << 1
    }

    pub const fn from_index(i: usize) -> Self {
        Self::new(i & 1 == 1, i & 2 == 2)
    }

    pub const fn is_clean(self) -> bool {
        !self.bit_flip && !self.phase_flip
    }

    /// Product of two Paulis, up to phase.
    #[must_use]
    pub const fn compose(self, other: Self) -> Self {
        Self::new(self.bit_flip ^ other.bit_flip, self.phase_flip ^ other.phase_flip)
    }

    #[inline]
    pub(crate) fn xor_bits(&mut self, bits: u8) {
        self.bit_flip ^= bits & 1 == 1;
        self.phase_flip ^= bits & 2 == 2;
    }
}

impl fmt::Display for ErrorFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match (self.bit_flip, self.phase_flip) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        };
        write!(f, "{c}")
    }
}

/// Depolarizing gate noise. `epsilon` is the probability of each specific
/// nontrivial single-qubit Pauli times three.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    epsilon: f64,
    gate_event_prob: f64,
}

impl NoiseModel {
    pub const MAX_EPSILON: f64 = 0.75;

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..Self::MAX_EPSILON).contains(&epsilon) {
            return Err(Error::config(format!("epsilon must lie in [0, 3/4), got {epsilon}")));
        }
        Ok(Self {
            epsilon,
            gate_event_prob: 4.0 / 3.0 * epsilon,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            epsilon: 0.0,
            gate_event_prob: 0.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `P = 4ε/3`.
    pub fn gate_event_prob(&self) -> f64 {
        self.gate_event_prob
    }

    /// Probability that `n` consecutive single-qubit noise events randomize
    /// a qubit at least once: `1 - (1 - P)^n`.
    pub fn batch_prob(&self, n: u32) -> f64 {
        1.0 - (1.0 - self.gate_event_prob).powi(n as i32)
    }
}

pub fn depolarize_one(flags: &mut ErrorFlags, noise: &NoiseModel, rng: &mut RandomStream) {
    batch_depolarize(flags, noise.gate_event_prob, rng);
}

pub fn depolarize_two(a: &mut ErrorFlags, b: &mut ErrorFlags, noise: &NoiseModel, rng: &mut RandomStream) {
    if rng.uniform() < noise.gate_event_prob {
        let bits = rng.fair_bits4();
        a.xor_bits(bits & 0b11);
        b.xor_bits(bits >> 2);
    }
}

/// With probability `p`, replace the qubit's error by a uniformly random one.
pub fn batch_depolarize(flags: &mut ErrorFlags, p: f64, rng: &mut RandomStream) {
    if rng.uniform() < p {
        flags.xor_bits(rng.fair_bits2());
    }
}

/// Where gate noise comes from. Circuits are written against this trait so
/// the same code runs under sampled noise, without noise, or with a single
/// scripted fault.
pub trait NoiseSource {
    fn single(&mut self, q: &mut ErrorFlags);
    fn pair(&mut self, a: &mut ErrorFlags, b: &mut ErrorFlags);
}

/// Sampled depolarizing noise.
pub struct Depolarizing<'a> {
    pub noise: NoiseModel,
    pub rng: &'a mut RandomStream,
}

impl<'a> Depolarizing<'a> {
    pub fn new(noise: NoiseModel, rng: &'a mut RandomStream) -> Self {
        Self { noise, rng }
    }
}

impl NoiseSource for Depolarizing<'_> {
    #[inline]
    fn single(&mut self, q: &mut ErrorFlags) {
        depolarize_one(q, &self.noise, self.rng);
    }

    #[inline]
    fn pair(&mut self, a: &mut ErrorFlags, b: &mut ErrorFlags) {
        depolarize_two(a, b, &self.noise, self.rng);
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Noiseless;

impl NoiseSource for Noiseless {
    fn single(&mut self, _: &mut ErrorFlags) {}
    fn pair(&mut self, _: &mut ErrorFlags, _: &mut ErrorFlags) {}
}

/// A deterministic fault to inject at a noise location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    Single(ErrorFlags),
    Pair(ErrorFlags, ErrorFlags),
}

/// Noise source that counts noise locations as they are visited and injects
/// the scripted faults at the given location indices. Unscripted locations
/// are noiseless. A `Pair` fault at a single-qubit location applies its first
/// component; a `Single` fault at a two-qubit location hits the first qubit.
#[derive(Debug, Default, Clone)]
pub struct ScriptedFaults {
    faults: Vec<(usize, Fault)>,
    visited: usize,
}

impl ScriptedFaults {
    pub fn new(faults: impl IntoIterator<Item = (usize, Fault)>) -> Self {
        Self {
            faults: faults.into_iter().collect(),
            visited: 0,
        }
    }

    /// Number of noise locations visited so far.
    pub fn visited(&self) -> usize {
        self.visited
    }

    fn next(&mut self) -> Option<Fault> {
        let here = self.visited;
        self.visited += 1;
        self.faults.iter().find(|(at, _)| *at == here).map(|&(_, f)| f)
    }
}

impl NoiseSource for ScriptedFaults {
    fn single(&mut self, q: &mut ErrorFlags) {
        match self.next() {
            Some(Fault::Single(e)) | Some(Fault::Pair(e, _)) => *q = q.compose(e),
            None => {}
        }
    }

    fn pair(&mut self, a: &mut ErrorFlags, b: &mut ErrorFlags) {
        match self.next() {
            Some(Fault::Single(e)) => *a = a.compose(e),
            Some(Fault::Pair(ea, eb)) => {
                *a = a.compose(ea);
                *b = b.compose(eb);
            }
            None => {}
        }
    }
}

/// Noisy Hadamard: noise event, then exchange of the two flags.
#[inline]
pub fn apply_hadamard(q: &mut ErrorFlags, noise: &mut impl NoiseSource) {
    noise.single(q);
    std::mem::swap(&mut q.bit_flip, &mut q.phase_flip);
}

/// Noisy XOR (CNOT): propagation, then a two-qubit noise event.
#[inline]
pub fn apply_xor(source: &mut ErrorFlags, target: &mut ErrorFlags, noise: &mut impl NoiseSource) {
    target.bit_flip ^= source.bit_flip;
    source.phase_flip ^= target.phase_flip;
    noise.pair(source, target);
}
