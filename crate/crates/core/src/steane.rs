//! Classical data of the 7-qubit CSS code and coset reduction of error
//! patterns.
//!
//! Binary words of length 7 are stored as `u8` masks with bit `j` standing for
//! qubit position `j`; the textual form `"1110100"` lists positions 0..6 left
//! to right.

use crate::error::{Error, Result};
use crate::pauli_frame::ErrorFlags;

pub const N_QUBITS: usize = 7;
const FULL: u8 = 0x7f;

/// Which half of the Pauli frame a check or correction acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    /// Bit flips, detected in the s-basis.
    Bit,
    /// Phase flips, detected in the c-basis.
    Phase,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::Bit, Component::Phase];

    #[inline]
    pub fn get(self, q: ErrorFlags) -> bool {
        match self {
            Component::Bit => q.bit_flip,
            Component::Phase => q.phase_flip,
        }
    }

    #[inline]
    pub fn flip(self, q: &mut ErrorFlags) {
        match self {
            Component::Bit => q.bit_flip ^= true,
            Component::Phase => q.phase_flip ^= true,
        }
    }
}

/// Parse a 7-character 0/1 string into a position mask.
pub fn word(s: &str) -> Result<u8> {
    if s.len() != N_QUBITS || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidCode(format!("expected 7 binary digits, got {s:?}")));
    }
    Ok(s.bytes()
        .enumerate()
        .filter(|&(_, b)| b == b'1')
        .fold(0, |m, (j, _)| m | 1 << j))
}

pub fn word_string(mask: u8) -> String {
    (0..N_QUBITS)
        .map(|j| if mask >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[inline]
pub fn weight(mask: u8) -> u32 {
    mask.count_ones()
}

#[inline]
fn parity(mask: u8) -> bool {
    mask.count_ones() & 1 == 1
}

/// Three syndrome bits, bit `i` for parity row `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Syndrome(pub u8);

impl Syndrome {
    pub fn from_bits(bits: [bool; 3]) -> Self {
        Syndrome(bits[0] as u8 | (bits[1] as u8) << 1 | (bits[2] as u8) << 2)
    }

    pub fn bit(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

/// The Steane code: a weight-4 basis of the dual code, a weight-3 codeword
/// outside the dual (used to tell logical 0 from 1), and the decode table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssCode {
    parity_rows: [u8; 3],
    zero_one_row: u8,
    decode_table: [Option<u8>; 8],
}

impl CssCode {
    pub const DEFAULT_ROWS: [&'static str; 3] = ["1110100", "1001110", "1101001"];
    pub const DEFAULT_ZERO_ONE_ROW: &'static str = "1100010";
    pub const ALL_ONES: u8 = FULL;

    /// Build from any basis of the dual code, checking every invariant the
    /// rest of the crate relies on.
    pub fn from_rows(parity_rows: [u8; 3], zero_one_row: u8) -> Result<Self> {
        let span = span3(parity_rows);
        if parity_rows.iter().chain([&zero_one_row]).any(|&r| r & !FULL != 0) {
            return Err(Error::InvalidCode("words must have length 7".into()));
        }
        if span[1..].contains(&0) {
            return Err(Error::InvalidCode("parity rows are linearly dependent".into()));
        }
        if let Some(&bad) = span[1..].iter().find(|&&s| weight(s) != 4) {
            return Err(Error::InvalidCode(format!(
                "dual codeword {} does not have weight 4",
                word_string(bad)
            )));
        }
        if weight(zero_one_row) != 3 {
            return Err(Error::InvalidCode("0/1 row must have weight 3".into()));
        }
        if span.contains(&zero_one_row) {
            return Err(Error::InvalidCode("0/1 row lies in the dual code".into()));
        }
        if parity_rows.iter().any(|&r| parity(r & zero_one_row)) {
            return Err(Error::InvalidCode(
                "0/1 row is not orthogonal to the parity rows".into(),
            ));
        }

        let mut decode_table = [None; 8];
        for j in 0..N_QUBITS {
            let s = syndrome_of_mask(&parity_rows, 1 << j);
            if decode_table[s.0 as usize].is_some() || s.is_trivial() {
                return Err(Error::InvalidCode(
                    "single flips do not have distinct nonzero syndromes".into(),
                ));
            }
            decode_table[s.0 as usize] = Some(j as u8);
        }
        Ok(Self {
            parity_rows,
            zero_one_row,
            decode_table,
        })
    }

    pub fn parity_rows(&self) -> [u8; 3] {
        self.parity_rows
    }

    /// The four rows cycled through by syndrome repetition: the basis and
    /// the sum of the three.
    pub fn cyclic_rows(&self) -> [u8; 4] {
        let [a, b, c] = self.parity_rows;
        [a, b, c, a ^ b ^ c]
    }

    pub fn zero_one_row(&self) -> u8 {
        self.zero_one_row
    }

    /// All eight elements of the dual code (the stabilizer patterns of one
    /// component), zero first.
    pub fn stabilizers(&self) -> [u8; 8] {
        span3(self.parity_rows)
    }

    pub fn decode(&self, s: Syndrome) -> Option<usize> {
        self.decode_table[s.0 as usize & 7].map(usize::from)
    }

    pub fn syndrome_of_pattern(&self, pattern: u8) -> Syndrome {
        syndrome_of_mask(&self.parity_rows, pattern)
    }

    /// Is `pattern` a codeword that acts as a logical operator, i.e. in C but
    /// not in the dual?
    pub fn is_logical(&self, pattern: u8) -> bool {
        self.syndrome_of_pattern(pattern).is_trivial() && parity(pattern)
    }
}

impl Default for CssCode {
    fn default() -> Self {
        build_steane()
    }
}

fn span3(rows: [u8; 3]) -> [u8; 8] {
    let mut out = [0u8; 8];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (0..3).filter(|i| k >> i & 1 == 1).fold(0, |m, i| m ^ rows[i]);
    }
    out
}

fn syndrome_of_mask(rows: &[u8; 3], pattern: u8) -> Syndrome {
    Syndrome::from_bits([
        parity(rows[0] & pattern),
        parity(rows[1] & pattern),
        parity(rows[2] & pattern),
    ])
}

pub fn build_steane() -> CssCode {
    let rows = CssCode::DEFAULT_ROWS.map(|r| word(r).expect("static row"));
    let zero_one = word(CssCode::DEFAULT_ZERO_ONE_ROW).expect("static row");
    CssCode::from_rows(rows, zero_one).expect("default Steane rows are valid")
}

/// One encoded qubit: seven data qubits plus the logical-failure flags
/// raised by [`canonicalize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct CodeBlock {
    pub qubits: [ErrorFlags; N_QUBITS],
    pub logical_x_failed: bool,
    pub logical_z_failed: bool,
}

impl CodeBlock {
    pub fn clean() -> Self {
        Self::default()
    }

    pub fn from_patterns(bits: u8, phases: u8) -> Self {
        let mut b = Self::default();
        b.set_pattern(Component::Bit, bits);
        b.set_pattern(Component::Phase, phases);
        b
    }

    pub fn pattern(&self, component: Component) -> u8 {
        self.qubits
            .iter()
            .enumerate()
            .filter(|(_, &q)| component.get(q))
            .fold(0, |m, (j, _)| m | 1 << j)
    }

    pub fn set_pattern(&mut self, component: Component, mask: u8) {
        for (j, q) in self.qubits.iter_mut().enumerate() {
            let want = mask >> j & 1 == 1;
            if component.get(*q) != want {
                component.flip(q);
            }
        }
    }

    pub fn logical_failed(&self, component: Component) -> bool {
        match component {
            Component::Bit => self.logical_x_failed,
            Component::Phase => self.logical_z_failed,
        }
    }

    pub fn failed(&self) -> bool {
        self.logical_x_failed || self.logical_z_failed
    }

    pub fn is_clean(&self) -> bool {
        self.qubits.iter().all(|q| q.is_clean())
    }

    fn toggle_logical(&mut self, component: Component) {
        match component {
            Component::Bit => self.logical_x_failed ^= true,
            Component::Phase => self.logical_z_failed ^= true,
        }
    }
}

pub fn syndrome_of(block: &CodeBlock, component: Component, code: &CssCode) -> Syndrome {
    code.syndrome_of_pattern(block.pattern(component))
}

/// Replace each component's error pattern by the minimum-weight member of
/// its coset, toggling the logical flag when the discarded part is a
/// logical operator.
pub fn canonicalize(block: &mut CodeBlock, code: &CssCode) {
    for component in Component::BOTH {
        let pattern = block.pattern(component);
        let correction = code.decode(code.syndrome_of_pattern(pattern)).map_or(0u8, |z| 1 << z);
        block.set_pattern(component, correction);
        if parity(pattern ^ correction) {
            block.toggle_logical(component);
        }
    }
}

/// Noiseless value of the 0/1-syndrome bit.
pub fn zero_one_parity(block: &CodeBlock, code: &CssCode) -> bool {
    parity(block.pattern(Component::Bit) & code.zero_one_row())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code() -> CssCode {
        build_steane()
    }

    #[test]
    fn default_rows() {
        let c = code();
        for r in c.parity_rows() {
            assert_eq!(weight(r), 4);
        }
        assert_eq!(word_string(c.zero_one_row()), "1100010");
        assert_eq!(weight(c.zero_one_row()), 3);
        assert_eq!(word_string(c.cyclic_rows()[3]), "1010011");
    }

    #[test]
    fn dual_code_weights() {
        let s = code().stabilizers();
        assert_eq!(s[0], 0);
        assert!(s[1..].iter().all(|&w| weight(w) == 4));
    }

    #[test]
    fn decode_round_trip() {
        let c = code();
        assert_eq!(c.decode(Syndrome(0)), None);
        let mut seen = [false; 7];
        for j in 0..7 {
            let s = c.syndrome_of_pattern(1 << j);
            let expect = Syndrome::from_bits(c.parity_rows().map(|r| r >> j & 1 == 1));
            assert_eq!(s, expect);
            assert_eq!(c.decode(s), Some(j));
            seen[j] = true;
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn alternate_basis_accepted() {
        // the basis displayed in textbook form generates the same code
        let rows = ["0001111", "0110011", "1010101"].map(|r| word(r).unwrap());
        let c = CssCode::from_rows(rows, word("1100001").unwrap());
        assert!(c.is_err(), "1100001 overlaps 0001111 oddly");
        let c = CssCode::from_rows(rows, word("1110000").unwrap()).unwrap();
        for j in 0..7 {
            assert_eq!(c.decode(c.syndrome_of_pattern(1 << j)), Some(j));
        }
    }

    #[test]
    fn invalid_bases_rejected() {
        let w = |s| word(s).unwrap();
        assert!(CssCode::from_rows([w("1110100"), w("1110100"), w("1101001")], w("1100010")).is_err());
        assert!(CssCode::from_rows([w("1110000"), w("1001110"), w("1101001")], w("1100010")).is_err());
        assert!(CssCode::from_rows([w("1110100"), w("1001110"), w("1101001")], w("1110100")).is_err());
        assert!(word("111").is_err());
        assert!(word("11101a0").is_err());
    }

    #[test]
    fn syndrome_examples() {
        let c = code();
        assert!(syndrome_of(&CodeBlock::clean(), Component::Bit, &c).is_trivial());
        for r in c.stabilizers() {
            let b = CodeBlock::from_patterns(r, r);
            assert!(syndrome_of(&b, Component::Bit, &c).is_trivial());
            assert!(syndrome_of(&b, Component::Phase, &c).is_trivial());
        }
    }

    #[test]
    fn canonicalize_examples() {
        let c = code();
        let mut b = CodeBlock::clean();
        canonicalize(&mut b, &c);
        assert_eq!(b, CodeBlock::clean());

        let mut b = CodeBlock::from_patterns(word("1110100").unwrap(), 0);
        canonicalize(&mut b, &c);
        assert_eq!(b, CodeBlock::clean());

        let mut b = CodeBlock::from_patterns(CssCode::ALL_ONES, 0);
        canonicalize(&mut b, &c);
        assert!(b.is_clean());
        assert!(b.logical_x_failed && !b.logical_z_failed);
    }

    #[test]
    fn two_flips_become_third_flip_and_logical() {
        let c = code();
        for j in 0..7 {
            for k in j + 1..7 {
                let pattern = 1u8 << j | 1 << k;
                let m = c.decode(c.syndrome_of_pattern(pattern)).unwrap();
                assert!(m != j && m != k);
                let mut b = CodeBlock::from_patterns(pattern, 0);
                canonicalize(&mut b, &c);
                assert_eq!(b.pattern(Component::Bit), 1 << m);
                assert!(b.logical_x_failed);
                assert!(c.is_logical(pattern | 1 << m));
                assert_eq!(weight(pattern | 1 << m), 3);
            }
        }
    }

    #[test]
    fn canonicalize_idempotent_exhaustive() {
        let c = code();
        for bits in 0..128u8 {
            for phases in 0..128u8 {
                let mut once = CodeBlock::from_patterns(bits, phases);
                canonicalize(&mut once, &c);
                let mut twice = once;
                canonicalize(&mut twice, &c);
                assert_eq!(once, twice);
                assert!(weight(once.pattern(Component::Bit)) <= 1);
                assert!(weight(once.pattern(Component::Phase)) <= 1);
            }
        }
    }

    #[test]
    fn coset_soundness_exhaustive() {
        let c = code();
        for component in Component::BOTH {
            for e in 0..128u8 {
                let mut base = CodeBlock::default();
                base.set_pattern(component, e);
                canonicalize(&mut base, &c);
                for s in c.stabilizers() {
                    let mut shifted = CodeBlock::default();
                    shifted.set_pattern(component, e ^ s);
                    canonicalize(&mut shifted, &c);
                    assert_eq!(base, shifted, "e={e:07b} s={s:07b}");
                }
            }
        }
    }

    #[test]
    fn logical_flag_matches_membership() {
        let c = code();
        // C = span(dual, all-ones); logical iff in C minus the dual
        let dual = c.stabilizers();
        let logical: Vec<u8> = dual.iter().map(|&s| s ^ CssCode::ALL_ONES).collect();
        for e in 0..128u8 {
            let mut b = CodeBlock::from_patterns(e, 0);
            canonicalize(&mut b, &c);
            let correction = b.pattern(Component::Bit);
            assert_eq!(b.logical_x_failed, logical.contains(&(e ^ correction)));
            assert!(dual.contains(&(e ^ correction)) || logical.contains(&(e ^ correction)));
        }
    }

    #[test]
    fn zero_one_parity_examples() {
        let c = code();
        assert!(!zero_one_parity(&CodeBlock::clean(), &c));
        assert!(zero_one_parity(&CodeBlock::from_patterns(CssCode::ALL_ONES, 0), &c));
        // position 2 is outside 1100010
        assert!(!zero_one_parity(&CodeBlock::from_patterns(1 << 2, 0), &c));
        assert!(zero_one_parity(&CodeBlock::from_patterns(1 << 0, 0), &c));
    }
}
