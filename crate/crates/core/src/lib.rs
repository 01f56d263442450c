//! Fault-tolerance threshold laboratory for the Steane 7-qubit code.
//!
//! Errors are tracked as a Pauli frame (one bit-flip and one phase-flip bit per
//! qubit) and pushed through Shor-style fault-tolerant error correction built
//! from verified cat states. On top of that sit a Monte Carlo engine that runs
//! an encoded qubit until it suffers an uncorrectable error, an exact
//! first/second-order fault enumerator for the cat and syndrome-bit circuits,
//! and the closed-form models used to read a threshold off the simulation.
//!
//! Flag encoding, shared by every module: `bit_flip` is the X component,
//! `phase_flip` the Z component, so `Y` has both set.

pub mod analysis;
pub mod enumeration;
pub mod error;
pub mod ftec;
pub mod montecarlo;
pub mod pauli_frame;
pub mod rng;
pub mod steane;

pub use error::{Error, Result};
pub use ftec::{Basis, FtecKind, FtecStrategy};
pub use montecarlo::{SurvivalStats, TrialConfig};
pub use pauli_frame::{ErrorFlags, NoiseModel};
pub use rng::RandomStream;
pub use steane::{CodeBlock, Component, CssCode};
