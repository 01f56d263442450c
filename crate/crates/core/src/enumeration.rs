//! Exact low-order fault enumeration for the cat-preparation and
//! syndrome-bit circuits.
//!
//! The circuits are described here as plain gate lists, independently of the
//! imperative code in [`crate::ftec`]. Every configuration of one (or two)
//! faults at distinct noise locations is propagated deterministically, and
//! its probability is accumulated as an exact rational coefficient of `ε`
//! (or `ε²`). A single-qubit location carries each of its 3 nontrivial Paulis
//! with weight `P/4 = ε/3`; a two-qubit location each of its 15 with weight
//! `P/16 = ε/12`.
//!
//! Rejected cat preparations are retried; at leading order the retry is
//! fault-free, so rejected configurations only contribute to the rejection
//! weight and the coefficients need no renormalization.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::ftec::{prepare_cat, Basis};
use crate::pauli_frame::{Depolarizing, ErrorFlags, NoiseModel};
use crate::rng::RandomStream;
use crate::steane::{CssCode, N_QUBITS};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// Single-qubit noise location.
    Noise1(usize),
    /// Two-qubit noise location.
    Noise2(usize, usize),
    Xor {
        source: usize,
        target: usize,
    },
    /// Noiseless flag exchange; pair with a preceding `Noise1`.
    Hadamard(usize),
}

impl Op {
    fn is_noise(&self) -> bool {
        matches!(self, Op::Noise1(_) | Op::Noise2(..))
    }

    /// Nontrivial fault patterns at this location.
    fn fault_patterns(&self) -> std::ops::Range<u8> {
        match self {
            Op::Noise1(_) => 1..4,
            Op::Noise2(..) => 1..16,
            _ => 0..0,
        }
    }

    fn pattern_weight(&self) -> Rational {
        match self {
            Op::Noise1(_) => Rational::new(1, 3),
            Op::Noise2(..) => Rational::new(1, 12),
            _ => Rational::zero(),
        }
    }

    /// Total fault probability of the location in units of `ε`.
    fn total_weight(&self) -> Rational {
        self.pattern_weight() * self.fault_patterns().len() as i64
    }
}

/// A fault: noise-location index (counting only noise ops) and pattern.
/// Patterns pack `ErrorFlags::index` of the first qubit in bits 0-1 and of the
/// second in bits 2-3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaultLocation {
    pub circuit_step: usize,
    pub fault_kind: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
}

impl Circuit {
    fn noise_ops(&self) -> Vec<Op> {
        self.ops.iter().copied().filter(Op::is_noise).collect()
    }

    /// Propagate the given faults (sorted by location) from `state`.
    pub fn run(&self, state: &mut [ErrorFlags], faults: &[FaultLocation]) {
        let mut loc = 0;
        let mut pending = faults.iter().peekable();
        for op in &self.ops {
            match *op {
                Op::Xor { source, target } => {
                    state[target].bit_flip ^= state[source].bit_flip;
                    state[source].phase_flip ^= state[target].phase_flip;
                }
                Op::Hadamard(q) => {
                    let f = &mut state[q];
                    std::mem::swap(&mut f.bit_flip, &mut f.phase_flip);
                }
                Op::Noise1(q) => {
                    if let Some(f) = pending.next_if(|f| f.circuit_step == loc) {
                        state[q] = state[q].compose(ErrorFlags::from_index(f.fault_kind as usize & 3));
                    }
                    loc += 1;
                }
                Op::Noise2(a, b) => {
                    if let Some(f) = pending.next_if(|f| f.circuit_step == loc) {
                        state[a] = state[a].compose(ErrorFlags::from_index(f.fault_kind as usize & 3));
                        state[b] = state[b].compose(ErrorFlags::from_index(f.fault_kind as usize >> 2));
                    }
                    loc += 1;
                }
            }
        }
    }

    /// All configurations of exactly `order` faults at distinct locations,
    /// with their weight as a coefficient of `ε^order`.
    pub fn configurations(&self, order: usize) -> Vec<(Vec<FaultLocation>, Rational)> {
        let noise = self.noise_ops();
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(
            noise: &[Op],
            from: usize,
            left: usize,
            weight: Rational,
            current: &mut Vec<FaultLocation>,
            out: &mut Vec<(Vec<FaultLocation>, Rational)>,
        ) {
            if left == 0 {
                out.push((current.clone(), weight));
                return;
            }
            for loc in from..noise.len() {
                for kind in noise[loc].fault_patterns() {
                    current.push(FaultLocation {
                        circuit_step: loc,
                        fault_kind: kind,
                    });
                    rec(
                        noise,
                        loc + 1,
                        left - 1,
                        weight * noise[loc].pattern_weight(),
                        current,
                        out,
                    );
                    current.pop();
                }
            }
        }
        rec(&noise, 0, order, Rational::from_integer(1), &mut current, &mut out);
        out
    }

    /// Sum over locations of their total fault weight, i.e. the order-1
    /// weight of all configurations.
    pub fn total_fault_weight(&self) -> Rational {
        self.noise_ops().iter().map(Op::total_weight).sum()
    }
}

/// Qubit layout of the cat circuits: cat qubits `offset..offset+size`, then
/// the verification ancilla.
#[derive(Debug, Clone, Copy)]
struct CatLayout {
    offset: usize,
    size: usize,
}

impl CatLayout {
    fn cat(&self, k: usize) -> usize {
        self.offset + k
    }

    fn ancilla(&self) -> usize {
        self.offset + self.size
    }
}

fn cat_ops(layout: CatLayout) -> Vec<Op> {
    let mut ops = Vec::new();
    for k in 0..layout.size {
        ops.push(Op::Noise1(layout.cat(k)));
    }
    // Hadamard on the first cat qubit acts on a basis-definite flag state
    ops.push(Op::Noise1(layout.cat(0)));
    for k in 1..layout.size {
        let (s, t) = (layout.cat(k - 1), layout.cat(k));
        ops.push(Op::Xor { source: s, target: t });
        ops.push(Op::Noise2(s, t));
    }
    let a = layout.ancilla();
    ops.push(Op::Noise1(a));
    for s in [layout.cat(0), layout.cat(layout.size - 1)] {
        ops.push(Op::Xor { source: s, target: a });
        ops.push(Op::Noise2(s, a));
    }
    ops.push(Op::Noise1(a));
    ops
}

/// The cat preparation and verification circuit (one attempt).
pub fn cat_circuit(size: usize) -> Circuit {
    let layout = CatLayout { offset: 0, size };
    Circuit {
        n_qubits: size + 1,
        ops: cat_ops(layout),
    }
}

/// Equivalence class of a verified cat's error: bit flips counted modulo
/// complementation of all qubits, phase flips modulo pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CatErrorClass {
    pub bit_flips: u32,
    pub phase_flip: bool,
}

impl CatErrorClass {
    pub fn of(cat: &[ErrorFlags]) -> Self {
        let w = cat.iter().filter(|q| q.bit_flip).count() as u32;
        let phases = cat.iter().filter(|q| q.phase_flip).count();
        Self {
            bit_flips: w.min(cat.len() as u32 - w),
            phase_flip: phases % 2 == 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatEnumeration {
    pub size: usize,
    pub order: usize,
    /// Accepted configurations by residual error class.
    pub accepted: BTreeMap<CatErrorClass, Rational>,
    pub rejected: Rational,
}

impl CatEnumeration {
    pub fn total(&self) -> Rational {
        self.accepted.values().copied().sum::<Rational>() + self.rejected
    }

    pub fn weight(&self, bit_flips: u32, phase_flip: bool) -> Rational {
        self.accepted
            .get(&CatErrorClass { bit_flips, phase_flip })
            .copied()
            .unwrap_or_else(Rational::zero)
    }

    /// Weight of accepted cats with the given number of bit flips, any phase.
    pub fn bit_flip_weight(&self, bit_flips: u32) -> Rational {
        self.weight(bit_flips, false) + self.weight(bit_flips, true)
    }
}

pub fn enumerate_cat(size: usize, order: usize) -> CatEnumeration {
    let circuit = cat_circuit(size);
    let layout = CatLayout { offset: 0, size };
    let mut accepted = BTreeMap::new();
    let mut rejected = Rational::zero();
    for (faults, w) in circuit.configurations(order) {
        let mut state = vec![ErrorFlags::I; circuit.n_qubits];
        circuit.run(&mut state, &faults);
        if state[layout.ancilla()].bit_flip {
            rejected += w;
        } else {
            *accepted
                .entry(CatErrorClass::of(&state[..size]))
                .or_insert_with(Rational::zero) += w;
        }
    }
    CatEnumeration {
        size,
        order,
        accepted,
        rejected,
    }
}

/// Leading Taylor coefficients of a verified cat's error probabilities:
/// the first three multiply `ε`, `p_2bf` multiplies `ε²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatCoefficients {
    pub p_1pf: Rational,
    pub p_1bf: Rational,
    pub p_1pf_1bf: Rational,
    pub p_2bf: Rational,
}

pub fn cat_coefficients(size: usize) -> CatCoefficients {
    let first = enumerate_cat(size, 1);
    let second = enumerate_cat(size, 2);
    CatCoefficients {
        p_1pf: first.weight(0, true),
        p_1bf: first.weight(1, false),
        p_1pf_1bf: first.weight(1, true),
        p_2bf: second.bit_flip_weight(2),
    }
}

/// Distribution of a verified cat's error class through order `ε²`,
/// conditioned on acceptance: `P(c) = first[c] ε + second[c] ε² + O(ε³)`.
///
/// Unlike the raw configuration sums, the second-order term includes the
/// `1 - W ε` no-fault factors of the other locations and the renormalization
/// by the acceptance probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatExpansion {
    pub first: BTreeMap<CatErrorClass, Rational>,
    pub second: BTreeMap<CatErrorClass, Rational>,
}

impl CatExpansion {
    pub fn probability(&self, class: CatErrorClass, epsilon: f64) -> f64 {
        let get = |m: &BTreeMap<CatErrorClass, Rational>| m.get(&class).copied().map_or(0.0, to_f64);
        get(&self.first) * epsilon + get(&self.second) * epsilon * epsilon
    }
}

pub fn cat_expansion(size: usize) -> CatExpansion {
    let circuit = cat_circuit(size);
    let layout = CatLayout { offset: 0, size };
    let loc_weights: Vec<Rational> = circuit.noise_ops().iter().map(Op::total_weight).collect();
    let total: Rational = loc_weights.iter().copied().sum();

    let mut first = BTreeMap::new();
    let mut second = BTreeMap::new();
    let mut rejected = Rational::zero();
    for (faults, w) in circuit.configurations(1) {
        let mut state = vec![ErrorFlags::I; circuit.n_qubits];
        circuit.run(&mut state, &faults);
        if state[layout.ancilla()].bit_flip {
            rejected += w;
            continue;
        }
        let class = CatErrorClass::of(&state[..size]);
        *first.entry(class).or_insert_with(Rational::zero) += w;
        let others = total - loc_weights[faults[0].circuit_step];
        *second.entry(class).or_insert_with(Rational::zero) -= w * others;
    }
    for (class, w) in enumerate_cat(size, 2).accepted {
        *second.entry(class).or_insert_with(Rational::zero) += w;
    }
    for (class, w) in &first {
        *second.entry(*class).or_insert_with(Rational::zero) += *w * rejected;
    }
    let clean = CatErrorClass {
        bit_flips: 0,
        phase_flip: false,
    };
    first.remove(&clean);
    second.remove(&clean);
    CatExpansion { first, second }
}

/// Which noise locations after cat preparation are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasurementScope {
    pub hadamard_noise: bool,
    pub readout_noise: bool,
}

impl MeasurementScope {
    /// Verified cat plus the data-coupling XORs.
    pub const COUPLING: Self = Self {
        hadamard_noise: false,
        readout_noise: false,
    };
    /// Every noise location of the simulated measurement.
    pub const COMPLETE: Self = Self {
        hadamard_noise: true,
        readout_noise: true,
    };
}

/// A syndrome-bit measurement on a codeword: data qubits `0..7`, then the cat
/// and its verification ancilla. Returns the circuit and the index of the
/// last op of cat verification.
pub fn syndrome_circuit(row: u8, basis: Basis, scope: MeasurementScope) -> (Circuit, usize) {
    let size = row.count_ones() as usize;
    let layout = CatLayout { offset: N_QUBITS, size };
    let mut ops = cat_ops(layout);
    let verified = ops.len();
    let hadamards = |ops: &mut Vec<Op>| {
        for k in 0..size {
            if scope.hadamard_noise {
                ops.push(Op::Noise1(layout.cat(k)));
            }
            ops.push(Op::Hadamard(layout.cat(k)));
        }
    };
    let support: Vec<usize> = (0..N_QUBITS).filter(|j| row >> j & 1 == 1).collect();
    if basis == Basis::S {
        hadamards(&mut ops);
    }
    for (k, &j) in support.iter().enumerate() {
        let (source, target) = match basis {
            Basis::S => (j, layout.cat(k)),
            Basis::C => (layout.cat(k), j),
        };
        ops.push(Op::Xor { source, target });
        ops.push(Op::Noise2(source, target));
    }
    if basis == Basis::C {
        hadamards(&mut ops);
    }
    if scope.readout_noise {
        for k in 0..size {
            ops.push(Op::Noise1(layout.cat(k)));
        }
    }
    (
        Circuit {
            n_qubits: N_QUBITS + size + 1,
            ops,
        },
        verified,
    )
}

/// First-order probabilities (coefficients of `ε`) that a syndrome-bit
/// measurement on a clean codeword reads wrong, damages the codeword, or
/// both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyndromeMeasCoefficients {
    pub p_sb: Rational,
    pub p_codeword: Rational,
    pub p_sb_codeword: Rational,
    /// Weight of configurations whose cat was rejected and retried.
    pub rejected: Rational,
    /// Weight of configurations with neither effect.
    pub harmless: Rational,
}

impl SyndromeMeasCoefficients {
    /// Accepted-and-classified plus rejected weight; equals the circuit's
    /// total single-fault weight.
    pub fn total(&self) -> Rational {
        self.p_sb + self.p_codeword - self.p_sb_codeword + self.harmless + self.rejected
    }
}

/// Row of the requested weight from the default code: a parity row for 4,
/// the 0/1 row for 3.
pub fn row_of_weight(code: &CssCode, row_weight: u32) -> Option<u8> {
    match row_weight {
        4 => Some(code.parity_rows()[0]),
        3 => Some(code.zero_one_row()),
        _ => None,
    }
}

/// Enumeration over the verified cat and the data-coupling XORs.
pub fn enumerate_syndrome_measurement(row_weight: u32, basis: Basis) -> SyndromeMeasCoefficients {
    enumerate_syndrome_measurement_with(row_weight, basis, MeasurementScope::COUPLING)
}

pub fn enumerate_syndrome_measurement_with(
    row_weight: u32,
    basis: Basis,
    scope: MeasurementScope,
) -> SyndromeMeasCoefficients {
    let code = CssCode::default();
    let row = row_of_weight(&code, row_weight).expect("row weight must be 3 or 4");
    let size = row_weight as usize;
    let (circuit, verified) = syndrome_circuit(row, basis, scope);
    let verify = Circuit {
        n_qubits: circuit.n_qubits,
        ops: circuit.ops[..verified].to_vec(),
    };
    let ancilla = N_QUBITS + size;
    let stabilizers = code.stabilizers();

    let zero = Rational::zero();
    let mut out = SyndromeMeasCoefficients {
        p_sb: zero,
        p_codeword: zero,
        p_sb_codeword: zero,
        rejected: zero,
        harmless: zero,
    };
    for (faults, w) in circuit.configurations(1) {
        let mut state = vec![ErrorFlags::I; circuit.n_qubits];
        verify.run(&mut state, &faults);
        if state[ancilla].bit_flip {
            out.rejected += w;
            continue;
        }
        let mut state = vec![ErrorFlags::I; circuit.n_qubits];
        circuit.run(&mut state, &faults);
        let wrong = state[N_QUBITS..N_QUBITS + size]
            .iter()
            .fold(false, |acc, q| acc ^ q.bit_flip);
        let mask = |f: fn(&ErrorFlags) -> bool| {
            state[..N_QUBITS]
                .iter()
                .enumerate()
                .filter(|(_, q)| f(q))
                .fold(0u8, |m, (j, _)| m | 1 << j)
        };
        let damaged = !stabilizers.contains(&mask(|q| q.bit_flip)) || !stabilizers.contains(&mask(|q| q.phase_flip));
        match (wrong, damaged) {
            (true, true) => {
                out.p_sb += w;
                out.p_codeword += w;
                out.p_sb_codeword += w;
            }
            (true, false) => out.p_sb += w,
            (false, true) => out.p_codeword += w,
            (false, false) => out.harmless += w,
        }
    }
    out
}

/// Empirical cat error distribution from `samples` sampled preparations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatSample {
    pub epsilon: f64,
    pub samples: u64,
    pub counts: BTreeMap<CatErrorClass, u64>,
    pub attempts: u64,
}

impl CatSample {
    pub fn count(&self, bit_flips: u32, phase_flip: bool) -> u64 {
        self.counts
            .get(&CatErrorClass { bit_flips, phase_flip })
            .copied()
            .unwrap_or(0)
    }
}

pub fn sample_cat(size: usize, epsilon: f64, samples: u64, seed: u64) -> crate::Result<CatSample> {
    const CHUNK: u64 = 1 << 16;
    let noise = NoiseModel::new(epsilon)?;
    let chunks = samples.div_ceil(CHUNK);
    let partial = (0..chunks)
        .into_par_iter()
        .map(|c| -> crate::Result<(BTreeMap<CatErrorClass, u64>, u64)> {
            let mut rng = RandomStream::derive(seed, c);
            let mut src = Depolarizing::new(noise, &mut rng);
            let mut counts = BTreeMap::new();
            let mut attempts = 0;
            for _ in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let cat = prepare_cat(size, 1000, &mut src)?;
                attempts += cat.attempts as u64;
                *counts.entry(CatErrorClass::of(cat.qubits())).or_insert(0) += 1;
            }
            Ok((counts, attempts))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    let mut attempts = 0;
    for (c, a) in partial {
        attempts += a;
        for (k, v) in c {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    Ok(CatSample {
        epsilon,
        samples,
        counts,
        attempts,
    })
}

/// Result of comparing a sampled frequency with `coefficient * ε`.
#[derive(Debug, Clone, Serialize)]
pub struct Agreement {
    pub name: &'static str,
    pub predicted: f64,
    pub observed: f64,
    pub sigma: f64,
    pub agrees: bool,
}

/// Compare sampled single-error frequencies with the expansion, at `z_max`
/// binomial standard deviations.
pub fn check_cat_sample(expansion: &CatExpansion, sample: &CatSample, z_max: f64) -> Vec<Agreement> {
    let n = sample.samples as f64;
    [("p_1pf", 0, true), ("p_1bf", 1, false), ("p_1pf_1bf", 1, true)]
        .into_iter()
        .map(|(name, bit_flips, phase_flip)| {
            let class = CatErrorClass { bit_flips, phase_flip };
            let predicted = expansion.probability(class, sample.epsilon);
            let sigma = (predicted * (1.0 - predicted) / n).sqrt();
            let observed = sample.count(bit_flips, phase_flip) as f64 / n;
            Agreement {
                name,
                predicted,
                observed,
                sigma,
                agrees: (observed - predicted).abs() <= z_max * sigma,
            }
        })
        .collect()
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render over a fixed denominator when exact, e.g. 13/3 over 9 as `"39/9"`.
pub fn format_over(r: Rational, denom: i64) -> String {
    let scaled = r * denom;
    if scaled.is_integer() {
        format!("{}/{}", scaled.numer(), denom)
    } else {
        format_rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn order_zero_is_clean_cat() {
        let e = enumerate_cat(4, 0);
        assert_eq!(e.weight(0, false), r(1, 1));
        assert_eq!(e.total(), r(1, 1));
    }

    #[test]
    fn location_weights() {
        let c = cat_circuit(4);
        assert_eq!(c.noise_ops().len(), 12);
        // 7 single-qubit locations at ε each, 5 XORs at 5ε/4 each
        assert_eq!(c.total_fault_weight(), r(7, 1) + r(25, 4));
        let configs = c.configurations(1);
        assert_eq!(configs.len(), 7 * 3 + 5 * 15);
        assert_eq!(
            configs.iter().map(|(_, w)| *w).sum::<Rational>(),
            c.total_fault_weight()
        );
    }

    #[test]
    fn first_order_cat() {
        let e = enumerate_cat(4, 1);
        // Z/Y at the reset or Hadamard of qubit 0: 2/3 + 2/3; Z on qubit 0 from
        // XOR 0->1: 1/3; four later XORs leave a phase on one qubit: 4 * 1/6
        assert_eq!(e.weight(0, true), r(7, 3));
        assert_eq!(e.weight(1, false), r(2, 3));
        assert_eq!(e.weight(1, true), r(2, 3));
        assert_eq!(e.bit_flip_weight(2), r(0, 1));
        assert_eq!(e.total(), cat_circuit(4).total_fault_weight());
    }

    #[test]
    fn second_order_cat() {
        let e = enumerate_cat(4, 2);
        assert_eq!(e.bit_flip_weight(2), r(6, 1));
        let single = cat_circuit(4).total_fault_weight();
        // sum over unordered pairs of distinct locations of w_i w_j
        let ws: Vec<Rational> = cat_circuit(4).noise_ops().iter().map(Op::total_weight).collect();
        let sq: Rational = ws.iter().map(|w| w * w).sum();
        assert_eq!(e.total(), (single * single - sq) / 2);
    }

    #[test]
    fn single_faults_never_pass_with_two_bit_flips() {
        for size in [3, 4] {
            let e = enumerate_cat(size, 1);
            assert!(e.accepted.keys().all(|c| c.bit_flips <= 1));
        }
    }

    #[test]
    fn syndrome_bit_coefficients() {
        for basis in [Basis::S, Basis::C] {
            let m = enumerate_syndrome_measurement(4, basis);
            let cat = cat_coefficients(4);
            // cat phase flips read wrong after the basis change, plus 4 XORs at 2/3
            assert_eq!(m.p_sb, cat.p_1pf + cat.p_1pf_1bf + r(8, 3), "{basis:?}");
            assert_eq!(m.p_codeword, cat.p_1bf + cat.p_1pf_1bf + r(4, 1), "{basis:?}");
            assert!(m.p_sb_codeword <= m.p_sb.min(m.p_codeword));
            let (circuit, _) = syndrome_circuit(CssCode::default().parity_rows()[0], basis, MeasurementScope::COUPLING);
            assert_eq!(m.total(), circuit.total_fault_weight());
        }
    }

    #[test]
    fn complete_scope_conserves_weight() {
        for basis in [Basis::S, Basis::C] {
            for w in [3, 4] {
                let m = enumerate_syndrome_measurement_with(w, basis, MeasurementScope::COMPLETE);
                let row = row_of_weight(&CssCode::default(), w).unwrap();
                let (circuit, _) = syndrome_circuit(row, basis, MeasurementScope::COMPLETE);
                assert_eq!(m.total(), circuit.total_fault_weight());
                assert!(m.p_sb > enumerate_syndrome_measurement(w, basis).p_sb);
            }
        }
    }

    #[test]
    fn expansion_matches_coefficients_at_first_order() {
        let c = cat_coefficients(4);
        let x = cat_expansion(4);
        let class = |b, p| CatErrorClass {
            bit_flips: b,
            phase_flip: p,
        };
        assert_eq!(x.first[&class(0, true)], c.p_1pf);
        assert_eq!(x.first[&class(1, false)], c.p_1bf);
        assert_eq!(x.first[&class(1, true)], c.p_1pf_1bf);
        assert!(!x.first.contains_key(&class(2, false)));
        assert_eq!(x.second[&class(2, false)] + x.second[&class(2, true)], c.p_2bf);
    }

    /// Exact distribution of flag states after `circuit` at physical error
    /// rate `eps`, indexed by packed `ErrorFlags::index` per qubit.
    fn propagate_distribution(circuit: &Circuit, eps: f64) -> Vec<f64> {
        let n = circuit.n_qubits;
        let get = |s: usize, q: usize| ErrorFlags::from_index(s >> (2 * q) & 3);
        let set = |s: usize, q: usize, f: ErrorFlags| s & !(3 << (2 * q)) | f.index() << (2 * q);
        let mut dist = vec![0.0; 1 << (2 * n)];
        dist[0] = 1.0;
        for op in &circuit.ops {
            let mut next = vec![0.0; dist.len()];
            for (s, &p) in dist.iter().enumerate().filter(|(_, p)| **p != 0.0) {
                match *op {
                    Op::Xor { source, target } => {
                        let mut st = vec![ErrorFlags::I; n];
                        for (q, f) in st.iter_mut().enumerate() {
                            *f = get(s, q);
                        }
                        st[target].bit_flip ^= st[source].bit_flip;
                        st[source].phase_flip ^= st[target].phase_flip;
                        let t = (0..n).fold(0, |t, q| set(t, q, st[q]));
                        next[t] += p;
                    }
                    Op::Hadamard(q) => {
                        let f = get(s, q);
                        next[set(s, q, ErrorFlags::new(f.phase_flip, f.bit_flip))] += p;
                    }
                    Op::Noise1(q) => {
                        next[s] += p * (1.0 - eps);
                        for k in 1..4 {
                            let f = get(s, q).compose(ErrorFlags::from_index(k));
                            next[set(s, q, f)] += p * eps / 3.0;
                        }
                    }
                    Op::Noise2(a, b) => {
                        next[s] += p * (1.0 - 1.25 * eps);
                        for k in 1..16 {
                            let fa = get(s, a).compose(ErrorFlags::from_index(k & 3));
                            let fb = get(s, b).compose(ErrorFlags::from_index(k >> 2));
                            next[set(set(s, a, fa), b, fb)] += p * eps / 12.0;
                        }
                    }
                }
            }
            dist = next;
        }
        dist
    }

    #[test]
    fn expansion_matches_exact_distribution() {
        for size in [3, 4] {
            let circuit = cat_circuit(size);
            let x = cat_expansion(size);
            let eps = 1e-4;
            let dist = propagate_distribution(&circuit, eps);
            let mut accepted = 0.0;
            let mut by_class: BTreeMap<CatErrorClass, f64> = BTreeMap::new();
            for (s, &p) in dist.iter().enumerate() {
                if ErrorFlags::from_index(s >> (2 * size) & 3).bit_flip {
                    continue;
                }
                accepted += p;
                let cat: Vec<ErrorFlags> = (0..size).map(|q| ErrorFlags::from_index(s >> (2 * q) & 3)).collect();
                *by_class.entry(CatErrorClass::of(&cat)).or_insert(0.0) += p;
            }
            for (class, p) in by_class {
                if class.bit_flips == 0 && !class.phase_flip {
                    continue;
                }
                let exact = p / accepted;
                let first = x.first.get(&class).copied().map_or(0.0, to_f64);
                let second = x.second.get(&class).copied().map_or(0.0, to_f64);
                let residual = (exact - first * eps) / (eps * eps);
                assert!(
                    (residual - second).abs() < 0.05 * second.abs().max(1.0),
                    "{size} {class:?}: {residual} vs {second}"
                );
            }
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(format_rational(r(5, 3)), "5/3");
        assert_eq!(format_rational(r(5, 1)), "5");
        assert_eq!(format_over(r(39, 9), 9), "39/9");
        assert_eq!(format_over(r(1, 4), 9), "1/4");
    }
}
