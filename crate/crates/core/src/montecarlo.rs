//! Survival Monte Carlo for one encoded qubit.
//!
//! A trial starts from a clean codeword and alternates a batch of `nop`
//! bitwise single-qubit gates with a full recovery, until canonicalization
//! reports a logical failure. The number of gates survived is the trial's
//! outcome; the inverse of its mean is the effective error rate per encoded
//! gate.
//!
//! Trial `i` always draws from `RandomStream::derive(master_seed, i)` and the
//! accumulators are integer sums, so results do not depend on the number of
//! worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ftec::{full_recovery, FtecStrategy};
use crate::pauli_frame::{batch_depolarize, depolarize_one, Depolarizing, NoiseModel};
use crate::rng::RandomStream;
use crate::steane::{canonicalize, CodeBlock, CssCode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub epsilon: f64,
    /// Bitwise single-qubit gates between recoveries. Forced to 1 by the
    /// per-gate strategies.
    pub nop: u32,
    pub strategy: FtecStrategy,
    pub master_seed: u64,
    pub target_rse: f64,
    pub rse_reference_rate: f64,
    /// Failures required before the stopping rule is consulted.
    pub min_failures: u64,
    pub max_trials: u64,
    pub max_rounds_per_trial: u64,
    /// Apply the gate noise as `nop` separate events instead of one
    /// compressed draw per qubit.
    pub uncompressed: bool,
}

impl TrialConfig {
    pub fn new(epsilon: f64, nop: u32, strategy: FtecStrategy, master_seed: u64) -> Self {
        Self {
            epsilon,
            nop,
            strategy,
            master_seed,
            target_rse: 0.02,
            rse_reference_rate: 0.002,
            min_failures: 10,
            max_trials: 10_000_000,
            max_rounds_per_trial: 10_000_000,
            uncompressed: false,
        }
    }

    pub fn effective_nop(&self) -> u32 {
        if self.strategy.kind.per_gate() {
            1
        } else {
            self.nop
        }
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        self.noise()?;
        self.strategy.validate()?;
        if self.nop == 0 {
            return Err(Error::config("nop must be at least 1"));
        }
        if !(self.target_rse > 0.0 && self.target_rse < 1.0) {
            return Err(Error::config("target_rse must lie in (0, 1)"));
        }
        if !(self.rse_reference_rate > 0.0) {
            return Err(Error::config("rse_reference_rate must be positive"));
        }
        if self.max_trials == 0 || self.max_rounds_per_trial == 0 {
            return Err(Error::config("trial caps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Failed { ops: u64, aborted_rounds: u64 },
    Censored { rounds: u64, aborted_rounds: u64 },
}

impl TrialOutcome {
    pub fn ops(&self) -> Option<u64> {
        match *self {
            TrialOutcome::Failed { ops, .. } => Some(ops),
            TrialOutcome::Censored { .. } => None,
        }
    }
}

pub fn run_trial(config: &TrialConfig, rng: &mut RandomStream, code: &CssCode) -> Result<TrialOutcome> {
    let noise = config.noise()?;
    let nop = config.effective_nop();
    let batch_p = noise.batch_prob(nop);
    let mut block = CodeBlock::clean();
    let mut aborted_rounds = 0;

    for round in 1..=config.max_rounds_per_trial {
        for q in block.qubits.iter_mut() {
            if config.uncompressed {
                for _ in 0..nop {
                    depolarize_one(q, &noise, rng);
                }
            } else {
                batch_depolarize(q, batch_p, rng);
            }
        }
        let report = full_recovery(
            &mut block,
            &config.strategy,
            round,
            code,
            &mut Depolarizing::new(noise, rng),
        )?;
        aborted_rounds += report.aborted() as u64;
        canonicalize(&mut block, code);
        if block.failed() {
            return Ok(TrialOutcome::Failed {
                ops: nop as u64 * round,
                aborted_rounds,
            });
        }
    }
    Ok(TrialOutcome::Censored {
        rounds: config.max_rounds_per_trial,
        aborted_rounds,
    })
}

/// Accumulated trial outcomes. Sums are exact integers, so merging is
/// associative and commutative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SurvivalStats {
    pub trials: u64,
    pub failures: u64,
    pub censored: u64,
    /// Gates survived, summed over failed trials.
    pub total_ops: u128,
    pub total_ops_sq: u128,
    pub aborted_rounds: u64,
    pub reached_precision: bool,
}

impl SurvivalStats {
    pub fn record(&mut self, outcome: TrialOutcome) {
        self.trials += 1;
        match outcome {
            TrialOutcome::Failed { ops, aborted_rounds } => {
                self.failures += 1;
                self.total_ops += ops as u128;
                self.total_ops_sq += (ops as u128) * (ops as u128);
                self.aborted_rounds += aborted_rounds;
            }
            TrialOutcome::Censored { aborted_rounds, .. } => {
                self.censored += 1;
                self.aborted_rounds += aborted_rounds;
            }
        }
    }

    pub fn merge(&mut self, other: &SurvivalStats) {
        self.trials += other.trials;
        self.failures += other.failures;
        self.censored += other.censored;
        self.total_ops += other.total_ops;
        self.total_ops_sq += other.total_ops_sq;
        self.aborted_rounds += other.aborted_rounds;
    }

    /// Failures per gate survived; 0 before any failure.
    pub fn effective_rate(&self) -> f64 {
        if self.total_ops == 0 {
            0.0
        } else {
            self.failures as f64 / self.total_ops as f64
        }
    }

    /// Relative standard error of the mean survival time,
    /// `sqrt(n * S2 / S1^2 - 1) / sqrt(n)`.
    pub fn rel_std_err(&self) -> f64 {
        if self.failures == 0 {
            return f64::INFINITY;
        }
        let n = self.failures as f64;
        let s1 = self.total_ops as f64;
        let s2 = self.total_ops_sq as f64;
        (n * s2 / (s1 * s1) - 1.0).max(0.0).sqrt() / n.sqrt()
    }

    /// Absolute standard error of the effective rate.
    pub fn std_err(&self) -> f64 {
        self.effective_rate() * self.rel_std_err()
    }

    /// The stopping rule: `rse * sqrt(rate / reference) < target`.
    pub fn precise_enough(&self, config: &TrialConfig) -> bool {
        self.failures >= config.min_failures.max(2)
            && self.rel_std_err() * (self.effective_rate() / config.rse_reference_rate).sqrt() < config.target_rse
    }
}

const FIRST_BATCH: u64 = 32;
const MAX_BATCH: u64 = 1024;

/// Run trials until the stopping rule is met or `max_trials` is reached.
///
/// Trials are scheduled in batches whose sizes depend only on how many
/// trials have run, executed in parallel on the current rayon pool, and then
/// folded in index order with the stopping rule checked after every trial.
/// The result is the same as a sequential run.
pub fn run_until_precision(config: &TrialConfig, code: &CssCode) -> Result<SurvivalStats> {
    config.validate()?;
    if config.epsilon == 0.0 {
        return Err(Error::config("epsilon must be positive for a survival run"));
    }
    let mut stats = SurvivalStats::default();
    let mut next = 0u64;
    let mut batch = FIRST_BATCH;
    while next < config.max_trials {
        let end = (next + batch).min(config.max_trials);
        let outcomes = (next..end)
            .into_par_iter()
            .map(|i| run_trial(config, &mut RandomStream::derive(config.master_seed, i), code))
            .collect::<Result<Vec<_>>>()?;
        for outcome in outcomes {
            stats.record(outcome);
            if stats.precise_enough(config) {
                stats.reached_precision = true;
                return Ok(stats);
            }
        }
        next = end;
        batch = (batch * 2).min(MAX_BATCH);
    }
    Ok(stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// The swept value: `nop` or epsilon.
    pub x: f64,
    pub stats: SurvivalStats,
}

impl SweepRow {
    pub fn effective_rate(&self) -> f64 {
        self.stats.effective_rate()
    }

    pub fn rel_std_err(&self) -> f64 {
        self.stats.rel_std_err()
    }
}

pub fn sweep_nop(base: &TrialConfig, nop_values: &[u32], code: &CssCode) -> Result<Vec<SweepRow>> {
    if nop_values.is_empty() {
        return Err(Error::config("nop sweep needs at least one value"));
    }
    nop_values
        .iter()
        .map(|&nop| {
            let config = TrialConfig { nop, ..*base };
            Ok(SweepRow {
                x: nop as f64,
                stats: run_until_precision(&config, code)?,
            })
        })
        .collect()
}

pub fn sweep_epsilon(base: &TrialConfig, epsilon_values: &[f64], code: &CssCode) -> Result<Vec<SweepRow>> {
    if epsilon_values.is_empty() {
        return Err(Error::config("epsilon sweep needs at least one value"));
    }
    if let Some(&e) = epsilon_values.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::config(format!(
            "epsilon {e} has no break-even; sweep values must be positive"
        )));
    }
    epsilon_values
        .iter()
        .map(|&epsilon| {
            let config = TrialConfig { epsilon, ..*base };
            Ok(SweepRow {
                x: epsilon,
                stats: run_until_precision(&config, code)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steane::build_steane;

    #[test]
    fn zero_noise_is_censored() {
        let code = build_steane();
        let mut config = TrialConfig::new(0.0, 15, FtecStrategy::full(), 1);
        config.max_rounds_per_trial = 50;
        let out = run_trial(&config, &mut RandomStream::new(0), &code).unwrap();
        assert_eq!(
            out,
            TrialOutcome::Censored {
                rounds: 50,
                aborted_rounds: 0
            }
        );
        assert!(run_until_precision(&config, &code).is_err());
    }

    #[test]
    fn validation() {
        let base = TrialConfig::new(0.001, 15, FtecStrategy::full(), 1);
        assert!(base.validate().is_ok());
        assert!(TrialConfig { nop: 0, ..base }.validate().is_err());
        assert!(TrialConfig {
            target_rse: 1.0,
            ..base
        }
        .validate()
        .is_err());
        assert!(TrialConfig { epsilon: 0.8, ..base }.validate().is_err());
        let code = build_steane();
        assert!(sweep_epsilon(&base, &[0.0, 0.001], &code).is_err());
        assert!(sweep_nop(&base, &[], &code).is_err());
    }

    #[test]
    fn stats_formulas() {
        let mut s = SurvivalStats::default();
        for ops in [10u64, 20, 30] {
            s.record(TrialOutcome::Failed { ops, aborted_rounds: 0 });
        }
        s.record(TrialOutcome::Censored {
            rounds: 5,
            aborted_rounds: 1,
        });
        assert_eq!((s.trials, s.failures, s.censored, s.aborted_rounds), (4, 3, 1, 1));
        assert!((s.effective_rate() - 3.0 / 60.0).abs() < 1e-15);
        // sqrt(3 * 1400 / 3600 - 1) / sqrt(3)
        let expect = (3.0f64 * 1400.0 / 3600.0 - 1.0).sqrt() / 3f64.sqrt();
        assert!((s.rel_std_err() - expect).abs() < 1e-15);
    }

    #[test]
    fn merge_is_order_independent() {
        let outcomes: Vec<_> = (1..50u64)
            .map(|i| TrialOutcome::Failed {
                ops: i * 7 % 23 + 1,
                aborted_rounds: i % 2,
            })
            .collect();
        let mut a = SurvivalStats::default();
        outcomes.iter().for_each(|&o| a.record(o));
        let mut left = SurvivalStats::default();
        let mut right = SurvivalStats::default();
        outcomes
            .iter()
            .rev()
            .enumerate()
            .for_each(|(i, &o)| if i % 3 == 0 { left.record(o) } else { right.record(o) });
        right.merge(&left);
        assert_eq!(a, right);
    }

    #[test]
    fn per_gate_forces_single_op() {
        let s = FtecStrategy::new(crate::ftec::FtecKind::PerGateFull);
        assert_eq!(TrialConfig::new(0.001, 15, s, 0).effective_nop(), 1);
        assert_eq!(TrialConfig::new(0.001, 15, FtecStrategy::full(), 0).effective_nop(), 15);
    }

    #[test]
    fn trial_is_reproducible() {
        let code = build_steane();
        let config = TrialConfig::new(0.003, 15, FtecStrategy::full(), 9);
        let a = run_trial(&config, &mut RandomStream::derive(9, 4), &code).unwrap();
        let b = run_trial(&config, &mut RandomStream::derive(9, 4), &code).unwrap();
        assert_eq!(a, b);
        assert!(a.ops().is_some_and(|ops| ops % 15 == 0));
    }
}
