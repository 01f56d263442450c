//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator. A stream derived from
//! `(master_seed, index)` is the generator seeded with `master_seed` (through
//! `SeedableRng::seed_from_u64`) and switched to ChaCha stream number `index`,
//! so the 2^64 derived streams are independent and do not depend on which
//! thread runs them.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The `index`-th independent stream of `master_seed`.
    pub fn derive(master_seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(index);
        Self { inner }
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    #[inline]
    pub fn fair_bit(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    /// Two independent fair bits packed in the low bits of the result.
    #[inline]
    pub fn fair_bits2(&mut self) -> u8 {
        (self.inner.next_u32() & 0b11) as u8
    }

    /// Four independent fair bits packed in the low bits of the result.
    #[inline]
    pub fn fair_bits4(&mut self) -> u8 {
        (self.inner.next_u32() & 0b1111) as u8
    }
}
