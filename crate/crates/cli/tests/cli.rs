//! End-to-end checks of the command-line interface: exit codes, report
//! shapes, file formats, and determinism across worker counts.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_codomain-gap")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_with_threads(args: &[&str], dir: &Path, threads: &str) -> Output {
    Command::new(bin())
        .args(args)
        .env("CODOMAIN_GAP_THREADS", threads)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn smooth_cosine_json() -> String {
    let sigma2 = 0.95f64 * 0.95;
    let theta = 1.0 / 2.0f64.sqrt();
    let rows: Vec<String> = (0..8)
        .map(|k| {
            let cols: Vec<String> = (0..8)
                .map(|l| {
                    if k == l {
                        "1.0".to_string()
                    } else {
                        let v = sigma2
                            * (2.0 * std::f64::consts::PI * theta * (k as f64 - l as f64)).cos();
                        format!("{v}")
                    }
                })
                .collect();
            format!("[{}]", cols.join(","))
        })
        .collect();
    format!("{{\"entries\": [{}]}}", rows.join(","))
}

#[test]
fn gap_reports_value_and_minimizer() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", r#"{"entries": [[0,1],[1,0]]}"#);
    let out = run(&["gap", "-m", "m.json", "-E", "{-1,1}"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["value"], Value::from(-2.0));
    assert_eq!(report["minimizer"], serde_json::json!([1.0, -1.0]));
    assert_eq!(report["method"], "ENUMERATION");
    assert_eq!(report["exact"], true);
    assert_eq!(report["revalidated"], true);
}

#[test]
fn gap_eta_and_tensor_modes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", r#"{"entries": [[0,1],[1,0]]}"#);
    let out = run(&["gap", "-m", "m.json", "-E", "{-1,1}", "--eta"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["value"], Value::from(4.0));

    write(
        dir.path(),
        "t.json",
        r#"{"q": 3, "n": 2, "entries": [1,1,1,1,1,1,1,1]}"#,
    );
    let out = run(
        &["gap", "-m", "t.json", "-E", "{-1,1}", "--tensor", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["value"], Value::from(-8.0));
}

#[test]
fn check_exit_codes_partition_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "psd2.json", r#"{"entries": [[1,0.5],[0.5,1]]}"#);
    // REALIZABLE -> 0
    let out = run(&["check", "cov", "-m", "psd2.json", "-E", "R"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"], "REALIZABLE");

    // NOT_REALIZABLE -> 1, certificate present
    write(dir.path(), "cosine8.json", &smooth_cosine_json());
    let out = run(
        &["check", "cov", "-m", "cosine8.json", "-E", "{-1,1}"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["status"], "NOT_REALIZABLE");
    assert!(report["certificate"].is_object());
    assert!(report["certificate"]["lambda"].is_array());

    // The identity is NOT a {0,1} covariance: unit diagonal forces the
    // field to be constant one, contradicting the zero off-diagonals.
    write(dir.path(), "id.json", r#"{"entries": [[1,0],[0,1]]}"#);
    let out = run(&["check", "cov", "-m", "id.json", "-E", "{0,1}"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // NECESSARY_PASSED -> 2 (independent Bernoulli(1/2) second moments).
    write(
        dir.path(),
        "bern.json",
        r#"{"entries": [[0.5,0.25],[0.25,0.5]]}"#,
    );
    let out = run(&["check", "cov", "-m", "bern.json", "-E", "{0,1}"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["status"], "NECESSARY_PASSED");

    // input errors -> 3
    let out = run(&["check", "cov", "-m", "missing.json", "-E", "R"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["check", "cov", "-m", "psd2.json", "-E", "(0,1)"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn variogram_and_moment_checks() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "vario.json",
        r#"{"entries": [[0,1,2],[1,0,1],[2,1,0]]}"#,
    );
    let out = run(
        &["check", "variogram", "-m", "vario.json", "-E", "R"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // Nonzero diagonal is an input error for variograms.
    write(dir.path(), "badvario.json", r#"{"entries": [[0.1,1],[1,0]]}"#);
    let out = run(
        &["check", "variogram", "-m", "badvario.json", "-E", "R"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));

    // Constant moment tensor over signs passes the battery.
    write(
        dir.path(),
        "t.json",
        &format!(
            r#"{{"q": 4, "n": 2, "entries": [{}]}}"#,
            vec!["1"; 16].join(",")
        ),
    );
    let out = run(
        &["check", "moment", "-m", "t.json", "-E", "{-1,1}"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_then_simulate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "corr.json",
        r#"{"entries": [[1,0.45,0.2],[0.45,1,0.3],[0.2,0.3,1]]}"#,
    );
    let out = run(
        &[
            "construct",
            "arcsin",
            "-m",
            "corr.json",
            "-a",
            "1.0",
            "-o",
            "rho.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("rho.json").exists());

    // The constructed covariance passes the two-point checker.
    let out = run(&["check", "cov", "-m", "rho.json", "-E", "{-1,1}"], dir.path());
    assert!(matches!(out.status.code(), Some(0) | Some(2)));

    // Monte Carlo validation of the same recipe.
    let out = run(
        &[
            "simulate",
            "arcsin",
            "-m",
            "corr.json",
            "-a",
            "1.0",
            "-N",
            "20000",
            "--seed",
            "5",
            "-o",
            "report.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["status"], "PASS");
    assert_eq!(report["config"]["seed"], 5);
}

#[test]
fn hafnian_command() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "ones4.csv",
        "1,1,1,1\n1,1,1,1\n1,1,1,1\n1,1,1,1\n",
    );
    let out = run(&["hafnian", "-m", "ones4.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["value"], Value::from(3.0));
}

#[test]
fn reports_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    // Large enough that the enumeration actually splits across workers.
    let n = 14;
    let rows: Vec<String> = (0..n)
        .map(|k| {
            let cols: Vec<String> = (0..n)
                .map(|l| format!("{}", ((k * 31 + l * 17) % 7) as f64 - 3.0))
                .collect();
            format!("[{}]", cols.join(","))
        })
        .collect();
    // Symmetrize via the upper triangle: write entries (k,l) = (l,k).
    let text = format!("{{\"entries\": [{}]}}", rows.join(","));
    let sym: Vec<Vec<f64>> = {
        let v: Value = serde_json::from_str(&text).unwrap();
        let raw: Vec<Vec<f64>> = serde_json::from_value(v["entries"].clone()).unwrap();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| if k <= l { raw[k][l] } else { raw[l][k] })
                    .collect()
            })
            .collect()
    };
    write(
        dir.path(),
        "big.json",
        &serde_json::to_string(&serde_json::json!({ "entries": sym })).unwrap(),
    );
    let args = ["gap", "-m", "big.json", "-E", "{-1,1}"];
    let one = run_with_threads(&args, dir.path(), "1");
    let many = run_with_threads(&args, dir.path(), "8");
    assert_eq!(one.status.code(), Some(0));
    let a = stdout_json(&one);
    let b = stdout_json(&many);
    assert_eq!(a["value"], b["value"]);
    assert_eq!(a["minimizer"], b["minimizer"]);
}

#[test]
fn csv_and_json_inputs_agree() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", r#"{"entries": [[2,0],[0,3]]}"#);
    write(dir.path(), "m.csv", "2,0\n0,3\n");
    let a = stdout_json(&run(&["gap", "-m", "m.json", "-E", "Z\\0"], dir.path()));
    let b = stdout_json(&run(&["gap", "-m", "m.csv", "-E", "Z\\0"], dir.path()));
    assert_eq!(a["value"], b["value"]);
    // Componentwise-nonzero reading: every coordinate must be a nonzero
    // integer, so diag(2,3) gives 5 at (1,1) rather than 2 at (1,0).
    assert_eq!(a["value"], Value::from(5.0));
}
