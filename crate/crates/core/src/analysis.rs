//! Closed-form models and curve analysis: the `a/x + b + c·x` fit, break-even
//! extraction, the hand model for `ε₁(n)`, the Toffoli error recursion, the
//! XOR error equilibrium and the memory-error factor.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::enumeration::Rational;
use crate::error::{Error, Result};

/// `f(x) = a/x + b + c·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalLinearFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Root-mean-square relative residual.
    pub residual: f64,
}

impl RationalLinearFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a / x + self.b + self.c * x
    }

    /// The three terms at `x`, in order.
    pub fn terms(&self, x: f64) -> [f64; 3] {
        [self.a / x, self.b, self.c * x]
    }

    /// `sqrt(a/c)`, when both are positive.
    pub fn minimizer(&self) -> Option<f64> {
        (self.a > 0.0 && self.c > 0.0).then(|| (self.a / self.c).sqrt())
    }
}

/// Least squares on relative residuals `(f(x) - y) / y`.
pub fn fit_rational_linear(points: &[(f64, f64)]) -> Result<RationalLinearFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InsufficientPoints(xs.len()));
    }
    let n = points.len();
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let (x, y) = points[i];
        [1.0 / x, 1.0, x][j] / y
    });
    let rhs = DVector::from_element(n, 1.0);
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|_| Error::InsufficientPoints(xs.len()))?;
    let mut fit = RationalLinearFit {
        a: sol[0],
        b: sol[1],
        c: sol[2],
        residual: 0.0,
    };
    let ss: f64 = points.iter().map(|&(x, y)| ((fit.eval(x) - y) / y).powi(2)).sum();
    fit.residual = (ss / n as f64).sqrt();
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakEven {
    pub epsilon: f64,
    /// Crossing of the curve shifted up by one standard error.
    pub lower: f64,
    /// Crossing of the curve shifted down by one standard error.
    pub upper: f64,
}

/// Where the effective rate crosses the diagonal `rate = ε`, interpolating
/// `ln(rate/ε)` linearly in `ln ε` between the bracketing samples. Rows are
/// `(epsilon, effective_rate, rel_std_err)` in increasing `epsilon`.
pub fn find_breakeven(curve: &[(f64, f64, f64)]) -> Result<BreakEven> {
    let crossing = |shift: f64| -> Option<f64> {
        let pts: Vec<(f64, f64)> = curve
            .iter()
            .filter(|&&(e, r, s)| e > 0.0 && r > 0.0 && (1.0 + shift * s) > 0.0)
            .map(|&(e, r, s)| (e.ln(), (r * (1.0 + shift * s) / e).ln()))
            .collect();
        pts.windows(2).find_map(|w| {
            let ((x0, g0), (x1, g1)) = (w[0], w[1]);
            if g0 == 0.0 {
                return Some(x0.exp());
            }
            if (g0 < 0.0) != (g1 < 0.0) || g1 == 0.0 {
                let t = g0 / (g0 - g1);
                Some((x0 + t * (x1 - x0)).exp())
            } else {
                None
            }
        })
    };
    let epsilon = crossing(0.0).ok_or(Error::NoBreakEven)?;
    let lower = crossing(1.0).unwrap_or(epsilon);
    let upper = crossing(-1.0).unwrap_or(epsilon);
    Ok(BreakEven {
        epsilon,
        lower: lower.min(upper),
        upper: lower.max(upper),
    })
}

/// Two-parameter model of one FTEC scheme: `p02 = K02·ε²` destroys a clean
/// codeword, `p12 = K12·ε` turns a correctable error uncorrectable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HandModelParams {
    pub k02: f64,
    pub k12: f64,
}

impl HandModelParams {
    /// Single-basis estimates from the crude hand count.
    pub const SINGLE_BASIS: Self = Self { k02: 130.0, k12: 9.6 };
    /// Factor applied to single-basis constants to stand in for a full step.
    pub const FULL_STEP_SCALE: f64 = 6.0;

    /// The default full-step constants: single-basis estimates scaled by 6.
    pub fn default_full() -> Self {
        Self::SINGLE_BASIS.scaled(Self::FULL_STEP_SCALE)
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            k02: self.k02 * factor,
            k12: self.k12 * factor,
        }
    }

    /// Optimal gates per recovery, `sqrt(K02/21)`.
    pub fn n_opt(&self) -> f64 {
        (self.k02 / 21.0).sqrt()
    }

    /// `(2·sqrt(21·K02), 7·K12)`.
    pub fn k_components(&self) -> (f64, f64) {
        (2.0 * (21.0 * self.k02).sqrt(), 7.0 * self.k12)
    }

    /// `K` with `ε₁(n_opt) = K·ε²`.
    pub fn k(&self) -> f64 {
        let (a, b) = self.k_components();
        a + b
    }

    pub fn p12(&self, epsilon: f64) -> f64 {
        self.k12 * epsilon
    }

    pub fn p02(&self, epsilon: f64) -> f64 {
        self.k02 * epsilon * epsilon
    }

    /// Transition from clean to correctable during recovery; neglected.
    pub fn p01(&self, _epsilon: f64) -> f64 {
        0.0
    }

    /// Break-even of the model, `1/K`.
    pub fn threshold(&self) -> f64 {
        1.0 / self.k()
    }
}

/// Uncorrectable errors per bitwise gate with a recovery every `n` gates:
/// `(21 n² + 7 n K12 + K02) ε² / n`.
pub fn hand_model_eps1(params: &HandModelParams, n: f64, epsilon: f64) -> f64 {
    (21.0 * n * n + 7.0 * n * params.k12 + params.k02) * epsilon * epsilon / n
}

/// Crude composition of `K02` from syndrome-bit error coefficients: one
/// fault that both flips the first syndrome bit and damages the codeword,
/// followed by either failure during the remaining measurements.
pub fn estimate_k02(p_sb_codeword: f64, p_sb: f64, p_codeword: f64, mean_measurements: f64) -> f64 {
    p_sb_codeword * (mean_measurements * p_sb + mean_measurements * p_codeword)
}

/// Crude `K12`: the fraction of correctable errors that trigger further
/// measurements times the damage done by four of them.
pub fn estimate_k12(p_codeword: f64) -> f64 {
    2.0 / 3.0 * 4.0 / 7.0 * 4.0 * p_codeword
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToffoliParams {
    pub eps0: f64,
    pub eps_t0: f64,
    /// `ε_{l+1} = level_gate_factor · ε_l²`.
    pub level_gate_factor: f64,
    pub c_gate: f64,
    pub c_linear: f64,
    pub c_quadratic: f64,
    pub c_cubic: f64,
}

impl ToffoliParams {
    pub fn new(eps0: f64, eps_t0: f64) -> Self {
        Self {
            eps0,
            eps_t0,
            level_gate_factor: 1000.0,
            c_gate: 5.0,
            c_linear: 10.0,
            c_quadratic: 20.0,
            c_cubic: 1.0 / 512.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps0,
            self.eps_t0,
            self.level_gate_factor,
            self.c_gate,
            self.c_linear,
            self.c_quadratic,
            self.c_cubic,
        ];
        if all.iter().all(|v| *v >= 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::config("Toffoli parameters must be finite and nonnegative"))
        }
    }

    /// One level up: `(ε_{l+1}, ε_{T,l+1})`.
    pub fn step(&self, eps: f64, eps_t: f64) -> (f64, f64) {
        let next = self.level_gate_factor * eps * eps;
        let next_t = self.c_gate * next
            + self.c_linear * eps_t * eps
            + self.c_quadratic * eps_t * eps_t * eps
            + self.c_cubic * eps_t.powi(3);
        (next, next_t)
    }
}

/// Gate and Toffoli error rates for levels `0..=levels`.
pub fn toffoli_recursion(params: &ToffoliParams, levels: usize) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    if levels == 0 {
        return Err(Error::config("levels must be at least 1"));
    }
    let mut out = vec![(params.eps0, params.eps_t0)];
    for _ in 0..levels {
        let &(e, t) = out.last().expect("nonempty");
        out.push(params.step(e, t));
    }
    Ok(out)
}

/// Fixed point of `x -> amplification · reduction · x + injection`.
pub fn xor_equilibrium(reduction: Rational, amplification: Rational, injection: Rational) -> Result<Rational> {
    let gain = amplification * reduction;
    if gain >= Rational::from_integer(1) {
        return Err(Error::Divergent(*gain.numer() as f64 / *gain.denom() as f64));
    }
    Ok(injection / (Rational::from_integer(1) - gain))
}

/// Defaults of the XOR error balance: a one-third step keeps 3/7 of the
/// errors, the XOR copies half again and adds one unit of its own.
pub fn default_xor_equilibrium() -> Result<Rational> {
    xor_equilibrium(Rational::new(3, 7), Rational::new(3, 2), Rational::from_integer(1))
}

/// Memory errors per operational error for one qubit of a sequentially
/// operated block: wait steps per operation.
pub fn memory_threshold_factor(_block_qubits: u32, ops_per_qubit: u32, wait_steps_per_qubit: u32) -> Result<Rational> {
    if ops_per_qubit == 0 {
        return Err(Error::config("ops_per_qubit must be at least 1"));
    }
    Ok(Rational::new(wait_steps_per_qubit as i64, ops_per_qubit as i64))
}

/// Sequential operation of a 12-qubit block: each qubit sees 2 operations
/// and waits 24 steps.
pub const DEFAULT_MEMORY_LAYOUT: (u32, u32, u32) = (12, 2, 24);

pub fn default_memory_threshold_factor() -> Result<Rational> {
    let (block, ops, wait) = DEFAULT_MEMORY_LAYOUT;
    memory_threshold_factor(block, ops, wait)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemoryEstimate {
    pub factor: f64,
    /// Power of ten nearest to `factor`.
    pub reduction: f64,
    pub gate_threshold: f64,
    pub memory_threshold: f64,
}

/// Memory-error threshold as the gate threshold divided by the factor
/// rounded to an order of magnitude.
pub fn memory_estimate(factor: Rational, gate_threshold: f64) -> MemoryEstimate {
    let factor = *factor.numer() as f64 / *factor.denom() as f64;
    let reduction = if factor > 0.0 {
        10f64.powi(factor.log10().round() as i32)
    } else {
        1.0
    };
    MemoryEstimate {
        factor,
        reduction,
        gate_threshold,
        memory_threshold: gate_threshold / reduction,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalNop {
    pub tabulated: u32,
    pub tabulated_rate: f64,
    pub fitted: Option<f64>,
    pub fit: Option<RationalLinearFit>,
}

/// Minimizer of a `(nop, effective_rate)` table, tabulated and from the fit.
pub fn find_optimal_nop(table: &[(u32, f64)]) -> Result<OptimalNop> {
    let &(tabulated, tabulated_rate) = table
        .iter()
        .filter(|(_, r)| *r > 0.0)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::InsufficientPoints(0))?;
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|(_, r)| *r > 0.0)
        .map(|&(n, r)| (n as f64, r))
        .collect();
    let fit = fit_rational_linear(&pts).ok();
    Ok(OptimalNop {
        tabulated,
        tabulated_rate,
        fitted: fit.and_then(|f| f.minimizer()),
        fit,
    })
}
