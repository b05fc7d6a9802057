use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fockweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockweyl")).args(args).output().expect("binary runs")
}

fn run_into(id: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", id, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    fockweyl(&args)
}

fn verdict(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("verdict.json")).unwrap()).unwrap()
}

#[test]
fn list_shows_every_experiment() {
    let out = fockweyl(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let ids: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(ids.len(), 11);
    for id in ["algebra-verify", "bec", "dyson-sweep", "hepp-sweep", "normal-approx"] {
        assert!(ids.contains(&id), "{id} missing");
    }
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"epsilons\": [0.1,").unwrap();
    let out_dir = dir.path().join("out");
    let out = run_into("hepp-sweep", &out_dir, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
}

#[test]
fn unknown_field_and_mismatched_id_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("unknown.json", "{\"foo\": 1}"), ("other.json", "{\"experiment\": \"bec\"}")] {
        let cfg = dir.path().join(name);
        fs::write(&cfg, body).unwrap();
        let out = run_into("normal-approx", &dir.path().join("out"), &["--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
}

#[test]
fn unknown_experiment_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into("no-such-experiment", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strong_coupling_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strong.json");
    fs::write(&cfg, r#"{"model": {"A": [[[0.5, 0.0]]], "Qtensor": [[[2.0, 0.0]]], "epsilon": 0.1, "n_max": 10}}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = run_into("hepp-sweep", &out_dir, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
}

#[test]
fn algebra_verify_passes_with_seed_7() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into("algebra-verify", dir.path(), &["--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = verdict(dir.path());
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 7);
    assert!(v["metrics"]["max_product_residual"].as_f64().unwrap() <= 1e-10);
    assert!(dir.path().join("algebra.csv").exists());
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_into("algebra-verify", &a, &["--seed", "11", "--jobs", "1"]).status.success());
    assert!(run_into("algebra-verify", &b, &["--seed", "11", "--jobs", "4"]).status.success());
    assert_eq!(fs::read(a.join("algebra.csv")).unwrap(), fs::read(b.join("algebra.csv")).unwrap());
    assert_eq!(fs::read(a.join("verdict.json")).unwrap(), fs::read(b.join("verdict.json")).unwrap());
}

#[test]
fn config_overrides_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "normal-approx", "lambdas": [50.0, 200.0]}"#).unwrap();
    let out = run_into("normal-approx", &dir.path().join("out"), &["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out/normal.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("indicator,50,"));
}

#[test]
fn hepp_sweep_reports_rate() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into("hepp-sweep", dir.path(), &[]).status.success());
    let v = verdict(dir.path());
    let slope = v["metrics"]["slope"].as_f64().unwrap();
    assert!((0.35..=0.65).contains(&slope));
    assert_eq!(v["outputs"][0], "hepp.csv");
}
