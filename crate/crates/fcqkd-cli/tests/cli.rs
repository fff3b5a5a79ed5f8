//! End-to-end tests of the `fcqkd` binary: exit codes, unit handling,
//! report formats, sweeps and the per-round log.

use std::path::Path;
use std::process::{Command, Output};

fn fcqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcqkd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const FAST_CLEAN: &str = "[channel]\nloss_db_per_km = 0.0\n\n[run]\nn_rounds = 5000\nmaster_seed = 11\n";

#[test]
fn validate_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", "[system]\ndelta_omega12_ghz = 1.0\n");
    let out = fcqkd(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("distinguishability"));
    assert!(text.contains("pass"));
}

#[test]
fn validate_fails_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "[system]\ndelta_omega12_ghz = 1.0\nsigma1_ghz = 0.2\nsigma2_ghz = 0.2\n",
    );
    let out = fcqkd(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn negative_loss_is_rejected_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "neg.toml", "[channel]\nloss_db_per_km = -1.0\n");
    let out = fcqkd(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("channel.loss_db_per_km"), "stderr: {err}");
}

#[test]
fn bound_text_reports_the_published_length() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", "[system]\ndelta_omega12_ghz = 1.0\n");
    let out = fcqkd(&["bound", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("x_B (paper form): 1000 km"),
        "bound output:\n{text}"
    );
}

#[test]
fn bound_structured_embeds_config_in_si() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "min.toml",
        "[channel]\nbeta_re_ps2_per_km = 1.0\n",
    );
    let out = fcqkd(&["bound", "--config", &cfg, "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        doc["config_si"]["channel"]["beta_re_s2_per_m"].as_f64(),
        Some(1e-27)
    );
    assert_eq!(doc["x_b_paper_m"].as_f64(), Some(1e6));
    assert_eq!(
        doc["config_si"]["system"]["omega0_rad_per_s"].as_f64(),
        Some(1e15)
    );
}

#[test]
fn simulate_exit_codes_by_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "clean.toml", FAST_CLEAN);
    let clean = fcqkd(&["simulate", "--config", &cfg]);
    assert_eq!(clean.status.code(), Some(0), "clean run should exit 0");

    let attacked = fcqkd(&["simulate", "--config", &cfg, "--eve", "--rounds", "10000"]);
    assert_eq!(attacked.status.code(), Some(4), "attack should exit 4");

    let starved = fcqkd(&["simulate", "--config", &cfg, "--rounds", "50"]);
    assert_eq!(starved.status.code(), Some(3), "tiny session should exit 3");
}

#[test]
fn simulate_structured_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "clean.toml", FAST_CLEAN);
    let args = [
        "simulate",
        "--config",
        &cfg,
        "--format",
        "structured",
        "--seed",
        "42",
    ];
    let a = fcqkd(&args);
    let b = fcqkd(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn round_log_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "clean.toml", FAST_CLEAN);
    let log_path = dir.path().join("rounds.csv");
    let out = fcqkd(&[
        "simulate",
        "--config",
        &cfg,
        "--rounds",
        "500",
        "--round-log",
        log_path.to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some());
    let log = std::fs::read_to_string(&log_path).unwrap();
    let mut lines = log.lines();
    assert_eq!(
        lines.next().unwrap(),
        "index,alice_kind,bob_kind,clicked,t_A_s,t_B_s,residual_s,kept,bit_A,bit_B,eve_intercepted"
    );
    assert_eq!(lines.count(), 500);
    let first = log.lines().nth(1).unwrap();
    assert_eq!(first.split(',').count(), 11);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", "[system]\ndelta_omega12_ghz = 1.0\n");
    let report = dir.path().join("bound.json");
    let out = fcqkd(&[
        "bound",
        "--config",
        &cfg,
        "--format",
        "structured",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["command"].as_str(), Some("bound"));
}

fn sweep_rows(stdout: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8(stdout.to_vec()).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn beta_sweep_reproduces_inverse_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", "[system]\ndelta_omega12_ghz = 1.0\n");
    let out = fcqkd(&[
        "sweep", "--config", &cfg, "--axis", "beta", "--from", "0.5", "--to", "2.0", "--steps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = sweep_rows(&out.stdout);
    assert_eq!(rows.len(), 4);
    // beta = 0.5, 1.0, 1.5, 2.0 ps^2/km -> paper-form 2000, 1000, 666.7, 500 km.
    let paper_km: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!((paper_km[0] - 2000.0).abs() < 1e-6);
    assert!((paper_km[1] - 1000.0).abs() < 1e-6);
    assert!((paper_km[3] - 500.0).abs() < 1e-6);
}

#[test]
fn delta_omega_sweep_is_inverse_in_separation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", "[system]\ndelta_omega12_ghz = 1.0\n");
    let out = fcqkd(&[
        "sweep",
        "--config",
        &cfg,
        "--axis",
        "delta-omega",
        "--from",
        "1.0",
        "--to",
        "2.0",
        "--steps",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = sweep_rows(&out.stdout);
    let paper_km: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!((paper_km[0] / paper_km[1] - 2.0).abs() < 1e-9);
}

#[test]
fn length_sweep_margin_is_strictly_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", "[system]\ndelta_omega12_ghz = 1.0\n");
    let out = fcqkd(&[
        "sweep", "--config", &cfg, "--axis", "length", "--from", "0", "--to", "1000",
        "--steps", "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = sweep_rows(&out.stdout);
    assert_eq!(rows.len(), 11);
    let margins: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    for w in margins.windows(2) {
        assert!(w[1] < w[0], "margin not decreasing: {margins:?}");
    }
}

#[test]
fn repo_sample_configs_parse_and_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let paper = root.join("configs/paper.toml");
    let eve = root.join("configs/eve.toml");
    let clean = fcqkd(&["simulate", "--config", paper.to_str().unwrap()]);
    assert_eq!(clean.status.code(), Some(0));
    let attacked = fcqkd(&["simulate", "--config", eve.to_str().unwrap()]);
    assert_eq!(attacked.status.code(), Some(4));
}
