use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use ftlab::analysis::{
    default_xor_equilibrium, find_breakeven, find_optimal_nop, memory_estimate, memory_threshold_factor,
    toffoli_recursion, HandModelParams, ToffoliParams,
};
use ftlab::enumeration::{
    cat_coefficients, cat_expansion, check_cat_sample, enumerate_syndrome_measurement, format_rational, sample_cat,
    Rational,
};
use ftlab::montecarlo::{sweep_epsilon, sweep_nop, SweepRow};
use ftlab::{Basis, CssCode, FtecKind, FtecStrategy, TrialConfig};

use crate::manifest::Manifest;
use crate::ranges;

const STRATEGIES: [&str; 4] = ["full", "one-third", "per-gate-full", "per-gate-one-third"];

fn nop_spec(s: &str) -> Result<String> {
    ranges::nop_values(s).map(|_| s.to_string())
}

fn eps_spec(s: &str) -> Result<String> {
    ranges::eps_values(s).map(|_| s.to_string())
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Effective error rate against gates per recovery (CSV).
    SweepNop(SweepNopArgs),
    /// Effective error rate against the physical error rate (CSV).
    SweepEps(SweepEpsArgs),
    /// Exact cat and syndrome-bit error coefficients (JSON).
    CatCoeffs(CatCoeffsArgs),
    /// Closed-form models: hand model, Toffoli recursion, equilibrium, memory (JSON).
    Models(ModelsArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RunOpts {
    #[arg(long, default_value = "full", value_parser = STRATEGIES)]
    pub strategy: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Target relative standard error at the reference rate 0.002.
    #[arg(long, default_value_t = 0.02)]
    pub target_rse: f64,
    #[arg(long, default_value = "1e7", value_parser = ranges::count)]
    pub max_trials: u64,
    /// Accept the 0,0,1,1 syndrome pattern instead of measuring again.
    #[arg(long)]
    pub no_guard: bool,
}

impl RunOpts {
    fn config(&self, epsilon: f64, nop: u32) -> Result<TrialConfig> {
        let kind: FtecKind = self.strategy.parse()?;
        let mut strategy = FtecStrategy::new(kind);
        strategy.special_case_guard = !self.no_guard;
        let mut cfg = TrialConfig::new(epsilon, nop, strategy, self.seed);
        cfg.target_rse = self.target_rse;
        cfg.max_trials = self.max_trials;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepNopArgs {
    #[arg(long)]
    pub eps: f64,
    /// A value or an inclusive range `a..b`.
    #[arg(long, value_parser = nop_spec)]
    pub nop: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunOpts,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepEpsArgs {
    /// A value or `start:stop:step`.
    #[arg(long, value_parser = eps_spec)]
    pub eps: String,
    #[arg(long, default_value_t = 15)]
    pub nop: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunOpts,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CatCoeffsArgs {
    /// Compare against sampled cat preparations.
    #[arg(long)]
    pub mc_check: bool,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value = "1e7", value_parser = ranges::count)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ModelsArgs {
    #[arg(long, default_value_t = HandModelParams::default_full().k02)]
    pub k02: f64,
    #[arg(long, default_value_t = HandModelParams::default_full().k12)]
    pub k12: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub eps_t0: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub level_gate_factor: f64,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 12)]
    pub block_qubits: u32,
    #[arg(long, default_value_t = 2)]
    pub ops_per_qubit: u32,
    #[arg(long, default_value_t = 24)]
    pub wait_steps: u32,
    /// Gate threshold the memory estimate is derived from.
    #[arg(long, default_value_t = 1e-3)]
    pub gate_threshold: f64,
}

pub struct Rendered {
    pub body: String,
    /// Human-readable summary for stderr.
    pub summary: String,
    pub precise: bool,
}

pub fn execute(command: &Command) -> Result<Rendered> {
    match command {
        Command::SweepNop(a) => sweep_nop_cmd(command, a),
        Command::SweepEps(a) => sweep_eps_cmd(command, a),
        Command::CatCoeffs(a) => cat_coeffs_cmd(command, a),
        Command::Models(a) => models_cmd(command, a),
    }
}

fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn csv(command: &Command, x_name: &str, rows: &[SweepRow], x_fmt: impl Fn(f64) -> String) -> String {
    let manifest = Manifest::new(command, rows.iter().map(|r| r.stats.reached_precision).collect());
    let mut out = manifest.csv_line();
    writeln!(out, "{x_name},effective_rate,rel_std_err,trials,censored").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            x_fmt(r.x),
            sci(r.effective_rate()),
            sci(r.rel_std_err()),
            r.stats.trials,
            r.stats.censored
        )
        .unwrap();
    }
    out
}

fn sweep_nop_cmd(command: &Command, a: &SweepNopArgs) -> Result<Rendered> {
    let nops = ranges::nop_values(&a.nop)?;
    let cfg = a.run.config(a.eps, nops[0])?;
    let rows = sweep_nop(&cfg, &nops, &CssCode::default())?;
    let body = csv(command, "nop", &rows, |x| format!("{}", x as u32));

    let table: Vec<(u32, f64)> = rows.iter().map(|r| (r.x as u32, r.effective_rate())).collect();
    let mut summary = String::new();
    match find_optimal_nop(&table) {
        Ok(opt) => {
            write!(
                summary,
                "minimum at nop={} (rate {})",
                opt.tabulated,
                sci(opt.tabulated_rate)
            )
            .unwrap();
            if let Some(fit) = opt.fit {
                write!(
                    summary,
                    "\nfit a/x+b+cx: a={} b={} c={} relative rms {:.3}",
                    sci(fit.a),
                    sci(fit.b),
                    sci(fit.c),
                    fit.residual
                )
                .unwrap();
            }
            if let Some(n) = opt.fitted {
                write!(summary, "\nfitted minimizer sqrt(a/c) = {n:.2}").unwrap();
            }
        }
        Err(e) => write!(summary, "no minimum: {e}").unwrap(),
    }
    Ok(Rendered {
        body,
        summary,
        precise: rows.iter().all(|r| r.stats.reached_precision),
    })
}

fn sweep_eps_cmd(command: &Command, a: &SweepEpsArgs) -> Result<Rendered> {
    let eps = ranges::eps_values(&a.eps)?;
    let cfg = a.run.config(eps[0], a.nop)?;
    let rows = sweep_epsilon(&cfg, &eps, &CssCode::default())?;
    let body = csv(command, "epsilon", &rows, sci);

    let curve: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r.x, r.effective_rate(), r.rel_std_err()))
        .collect();
    let summary = match find_breakeven(&curve) {
        Ok(b) => format!(
            "break-even epsilon = {} (1/{:.0}), band [{}, {}]",
            sci(b.epsilon),
            1.0 / b.epsilon,
            sci(b.lower),
            sci(b.upper)
        ),
        Err(_) => "no break-even in sweep range".to_string(),
    };
    Ok(Rendered {
        body,
        summary,
        precise: rows.iter().all(|r| r.stats.reached_precision),
    })
}

fn rat(r: Rational) -> serde_json::Value {
    json!(format_rational(r))
}

fn cat_coeffs_cmd(command: &Command, a: &CatCoeffsArgs) -> Result<Rendered> {
    let c = cat_coefficients(4);
    let mut measurements = Vec::new();
    for row_weight in [4, 3] {
        for basis in [Basis::S, Basis::C] {
            let m = enumerate_syndrome_measurement(row_weight, basis);
            measurements.push(json!({
                "row_weight": row_weight,
                "basis": if basis == Basis::S { "s" } else { "c" },
                "p_sb": rat(m.p_sb),
                "p_codeword": rat(m.p_codeword),
                "p_sb_codeword": rat(m.p_sb_codeword),
            }));
        }
    }
    let mut report = json!({
        "manifest": Manifest::new(command, Vec::new()),
        "cat": {
            "p_1pf": rat(c.p_1pf),
            "p_1bf": rat(c.p_1bf),
            "p_1pf_1bf": rat(c.p_1pf_1bf),
            "p_2bf": rat(c.p_2bf),
        },
        "syndrome_measurement": measurements,
    });
    let mut summary = format!(
        "cat: p_1pf={} p_1bf={} p_1pf_1bf={} (x eps), p_2bf={} (x eps^2)",
        format_rational(c.p_1pf),
        format_rational(c.p_1bf),
        format_rational(c.p_1pf_1bf),
        format_rational(c.p_2bf)
    );
    if a.mc_check {
        let sample = sample_cat(4, a.eps, a.samples, a.seed)?;
        let agreements = check_cat_sample(&cat_expansion(4), &sample, 3.0);
        let all = agreements.iter().all(|x| x.agrees);
        write!(
            summary,
            "\nsampling check at eps={}: {}",
            a.eps,
            if all { "agrees" } else { "DISAGREES" }
        )
        .unwrap();
        report["mc_check"] = json!({
            "epsilon": a.eps,
            "samples": a.samples,
            "z_max": 3.0,
            "agreements": agreements,
            "all_agree": all,
        });
    }
    Ok(Rendered {
        body: format!("{}\n", serde_json::to_string_pretty(&report)?),
        summary,
        precise: true,
    })
}

fn models_cmd(command: &Command, a: &ModelsArgs) -> Result<Rendered> {
    if !(a.k02 >= 0.0 && a.k12 >= 0.0) {
        return Err(ftlab::Error::config("K02 and K12 must be nonnegative").into());
    }
    let hand = HandModelParams { k02: a.k02, k12: a.k12 };
    let (k_a, k_b) = hand.k_components();

    let mut toffoli = ToffoliParams::new(a.eps0, a.eps_t0);
    toffoli.level_gate_factor = a.level_gate_factor;
    let trajectory: Vec<_> = toffoli_recursion(&toffoli, a.levels)?
        .into_iter()
        .enumerate()
        .map(|(level, (eps, eps_t))| json!({ "level": level, "epsilon": eps, "epsilon_toffoli": eps_t }))
        .collect();

    let x = default_xor_equilibrium()?;
    let factor = memory_threshold_factor(a.block_qubits, a.ops_per_qubit, a.wait_steps)?;
    if !(a.gate_threshold > 0.0) {
        return Err(anyhow!(ftlab::Error::config("gate threshold must be positive")));
    }
    let mem = memory_estimate(factor, a.gate_threshold);

    let report = json!({
        "manifest": Manifest::new(command, Vec::new()),
        "hand_model": {
            "k02": a.k02,
            "k12": a.k12,
            "n_opt": hand.n_opt(),
            "k_components": [k_a, k_b],
            "k": hand.k(),
            "threshold": hand.threshold(),
        },
        "toffoli": trajectory,
        "xor_equilibrium": rat(x),
        "memory": {
            "factor": rat(factor),
            "reduction": mem.reduction,
            "gate_threshold": mem.gate_threshold,
            "memory_threshold": mem.memory_threshold,
        },
    });
    let summary = format!(
        "K = {k_a:.0} + {k_b:.0} = {:.0}, n_opt = {:.2}; x* = {}; memory factor {} -> threshold / {} = {:.0e}",
        hand.k(),
        hand.n_opt(),
        format_rational(x),
        format_rational(factor),
        mem.reduction,
        mem.memory_threshold
    );
    Ok(Rendered {
        body: format!("{}\n", serde_json::to_string_pretty(&report)?),
        summary,
        precise: true,
    })
}
