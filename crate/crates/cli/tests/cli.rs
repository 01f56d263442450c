use std::path::Path;
use std::process::{Command, Output};

fn ftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

const SMALL_NOP_SWEEP: &[&str] = &["sweep-nop", "--eps", "0.003", "--nop", "2..4", "--target-rse", "0.1"];

#[test]
fn sweep_nop_writes_csv_with_manifest() {
    let o = ftlab(SMALL_NOP_SWEEP);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# manifest {"));
    assert_eq!(lines[1], "nop,effective_rate,rel_std_err,trials,censored");
    assert_eq!(lines.len(), 2 + 3);
    for (line, nop) in lines[2..].iter().zip(2..) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        assert_eq!(cols[0], nop.to_string());
        // six significant digits in scientific notation
        assert!(
            cols[1].contains('e') && cols[1].split('e').next().unwrap().len() == 7,
            "{line}"
        );
    }
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("minimum at nop="));
}

#[test]
fn output_is_independent_of_workers() {
    let mut one = vec!["--workers", "1"];
    one.extend_from_slice(SMALL_NOP_SWEEP);
    let mut four = vec!["--workers", "4"];
    four.extend_from_slice(SMALL_NOP_SWEEP);
    assert_eq!(ftlab(&one).stdout, ftlab(&four).stdout);
}

fn replay_matches(args: &[&str], name: &str) {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join(name);
    let second = dir.path().join(format!("replayed-{name}"));
    let mut run = vec!["--out", first.to_str().unwrap()];
    run.extend_from_slice(args);
    assert_eq!(ftlab(&run).status.code(), Some(0));
    let o = ftlab(&["replay", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&first), read(&second));
}

#[test]
fn replay_reproduces_csv_and_json() {
    replay_matches(
        &[
            "sweep-eps",
            "--eps",
            "0.002:0.004:0.002",
            "--nop",
            "10",
            "--target-rse",
            "0.1",
            "--seed",
            "9",
        ],
        "eps.csv",
    );
    replay_matches(&["models", "--k02", "500"], "models.json");
    replay_matches(&["cat-coeffs"], "cat.json");
}

#[test]
fn replay_rejects_files_without_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plain.csv");
    std::fs::write(&path, "nop,effective_rate\n1,0.1\n").unwrap();
    assert_eq!(ftlab(&["replay", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["sweep-nop", "--eps", "0.002", "--nop", "0..5"][..],
        &["sweep-nop", "--eps", "0.002", "--nop", "1..3", "--strategy", "half"],
        &["sweep-eps", "--eps", "0:0.01:0.001"],
        &["sweep-eps", "--eps", "0.002", "--target-rse", "2"],
        &["sweep-nop", "--eps", "0.9", "--nop", "1"],
        &["models", "--levels", "0"],
        &["--workers", "0", "models"],
        &["no-such-command"],
    ] {
        let o = ftlab(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn unreached_precision_exits_1() {
    let o = ftlab(&[
        "sweep-nop",
        "--eps",
        "0.003",
        "--nop",
        "5",
        "--target-rse",
        "0.001",
        "--max-trials",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("\"rows_precise\":[false]"));
    assert!(text.lines().nth(2).unwrap().starts_with("5,"));
}

#[test]
fn per_gate_break_even_is_reported() {
    let o = ftlab(&[
        "sweep-eps",
        "--eps",
        "0.0003:0.0009:0.0003",
        "--strategy",
        "per-gate-full",
        "--target-rse",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("break-even epsilon ="));
}

#[test]
fn cat_coeffs_reports_exact_rationals() {
    let o = ftlab(&["cat-coeffs", "--mc-check", "--samples", "2e5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["p_1pf", "p_1bf", "p_1pf_1bf", "p_2bf"] {
        let s = v["cat"][key].as_str().unwrap();
        assert!(s.split('/').all(|p| p.parse::<i64>().is_ok()), "{key} = {s}");
    }
    assert_eq!(v["cat"]["p_1bf"], "2/3");
    assert_eq!(v["cat"]["p_1pf_1bf"], "2/3");
    assert_eq!(v["syndrome_measurement"].as_array().unwrap().len(), 4);
    assert_eq!(v["mc_check"]["all_agree"], true);
    assert_eq!(v["mc_check"]["agreements"].as_array().unwrap().len(), 3);
}

#[test]
fn models_defaults() {
    let o = ftlab(&["models"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let k = v["hand_model"]["k"].as_f64().unwrap();
    assert!((630.0..=680.0).contains(&k));
    let parts = v["hand_model"]["k_components"].as_array().unwrap();
    assert!((parts[0].as_f64().unwrap() - 255.0).abs() <= 5.0);
    assert!((parts[1].as_f64().unwrap() - 400.0).abs() <= 5.0);
    assert_eq!(v["xor_equilibrium"], "14/5");
    assert_eq!(v["memory"]["factor"], "12");
    assert_eq!(v["memory"]["reduction"].as_f64(), Some(10.0));
    assert!((v["memory"]["memory_threshold"].as_f64().unwrap() - 1e-4).abs() < 1e-15);
    let toffoli = v["toffoli"].as_array().unwrap();
    assert_eq!(toffoli.len(), 4);
    let t1 = toffoli[1]["epsilon_toffoli"].as_f64().unwrap();
    assert!((t1 - 5.01e-5).abs() < 1e-7);
}
