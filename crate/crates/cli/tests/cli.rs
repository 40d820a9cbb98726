use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qhog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhog")).args(args).output().expect("binary runs")
}

fn status_record(out: &Output) -> Value {
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().last().expect("summary line");
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {line}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn homogenize_meets_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("traj.csv");
    let out = qhog(&["homogenize", "--delta", "0.2", "--system", "one", "--reservoir", "zero", "--out", p(&file)]);
    assert!(out.status.success());
    let rec = status_record(&out);
    assert_eq!(rec["summary"]["n"], 22);
    assert_eq!(rec["summary"]["system_within_delta"], true);
    let csv = fs::read_to_string(&file).unwrap();
    assert_eq!(csv.lines().count(), 24);
    assert!(csv.starts_with("n,wx,wy,wz,txp,typ,tzp,D_sys,D_res\n"));
}

#[test]
fn homogenize_short_run_fails_the_check() {
    let out = qhog(&["homogenize", "--delta", "0.2", "--n", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let rec = status_record(&out);
    assert_eq!(rec["status"], "fail");
    assert_eq!(rec["failures"][0]["check"], "system_within_delta");
}

#[test]
fn zero_angle_and_fixed_point_trajectories() {
    let out = qhog(&["homogenize", "--eta", "0", "--n", "4", "--system", "plus", "--format", "json"]);
    assert!(out.status.success());
    let recs: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(recs.iter().all(|r| r["wx"] == 0.5 && r["D_res"] == 0.0));

    let out = qhog(&["homogenize", "--eta", "0.7", "--n", "6", "--system", "0.1,0.2,-0.3", "--reservoir", "0.1,0.2,-0.3", "--format", "json"]);
    let recs: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    for r in recs {
        assert!(r["D_sys"].as_f64().unwrap() < 1e-12 && r["D_res"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn bounds_values() {
    let out = qhog(&["bounds", "--delta", "0.02", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["sin_eta_max"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert_eq!(v["n_delta"], 459);
    for (d, n) in [("0.2", 22), ("1", 1)] {
        let v: Value = serde_json::from_slice(&qhog(&["bounds", "--delta", d, "--format", "json"]).stdout).unwrap();
        assert_eq!(v["n_delta"], n);
    }
}

#[test]
fn angle_flags_are_exclusive_and_required() {
    assert_eq!(qhog(&["bounds"]).status.code(), Some(2));
    assert_eq!(qhog(&["bounds", "--eta", "0.1", "--delta", "0.1"]).status.code(), Some(2));
    let out = qhog(&["homogenize", "--eta", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(status_record(&out)["status"], "error");
}

#[test]
fn simulate_reports_reduced_states_and_honours_the_cap() {
    let out = qhog(&["simulate", "--eta", "0.4", "--n", "3", "--order", "3,1,2", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["log"], serde_json::json!([3, 1, 2]));
    assert_eq!(v["qubits"].as_array().unwrap().len(), 4);

    let out = Command::new(env!("CARGO_BIN_EXE_qhog"))
        .args(["simulate", "--eta", "0.4", "--n", "6"])
        .env("QHOG_MAX_QUBITS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(qhog(&["simulate", "--eta", "0.4", "--n", "2", "--order", "1,1"]).status.code() == Some(2));
    assert_eq!(qhog(&["simulate", "--eta", "0.4", "--n", "2", "--reservoir", "0,0,0"]).status.code(), Some(2));
}

#[test]
fn entangle_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = qhog(&["entangle", "--delta", "0.2", "--n", "10", "--out", p(dir.path())]);
    assert!(out.status.success());
    let rec = status_record(&out);
    assert!(rec["summary"]["max_residual"].as_f64().unwrap() <= 1e-8);
    let conc = fs::read_to_string(dir.path().join("concurrence.csv")).unwrap();
    assert_eq!(conc.lines().next(), Some("j,k,C,C_closed,residual"));
    assert_eq!(conc.lines().count(), 1 + 55);
    let first: Vec<&str> = conc.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&first[..2], ["0", "1"]);
    let tang = fs::read_to_string(dir.path().join("tangles.csv")).unwrap();
    assert_eq!(tang.lines().next(), Some("j,tau,S"));
    assert_eq!(tang.lines().count(), 12);
}

#[test]
fn entangle_outside_the_regime_leaves_closed_forms_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = qhog(&["entangle", "--eta", "0.5", "--n", "3", "--system", "plus", "--out", p(dir.path())]);
    assert!(out.status.success());
    assert_eq!(status_record(&out)["summary"]["closed_form"], false);
    let conc = fs::read_to_string(dir.path().join("concurrence.csv")).unwrap();
    assert!(conc.lines().skip(1).all(|l| l.ends_with(",,")));
}

#[test]
fn safe_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, threads) in [(&a, "1"), (&b, "3")] {
        let out = qhog(&["safe", "--delta", "0.2", "--n", "6", "--threads", threads, "--out", p(d.path())]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["safe_correct.csv", "safe_incorrect.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.path().join("safe_correct.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    let total: u64 = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 720);
}

#[test]
fn safe_json_counts_and_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let out = qhog(&["safe", "--delta", "0.2", "--n", "5", "--format", "json", "--out", p(dir.path())]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&fs::read(dir.path().join("safe_incorrect.json")).unwrap()).unwrap();
    assert_eq!(v["total_trials"], 5 * 120);
    assert_eq!(v["exact_reversals"], 0);

    let run = |seed: &str| {
        let d = tempfile::tempdir().unwrap();
        let out = qhog(&["safe", "--delta", "0.2", "--n", "12", "--mode", "incorrect", "--sample", "500", "--seed", seed, "--out", p(d.path())]);
        assert!(out.status.success());
        fs::read(d.path().join("safe_incorrect.csv")).unwrap()
    };
    assert_eq!(run("4"), run("4"));
    assert_eq!(qhog(&["safe", "--delta", "0.2", "--n", "12", "--out", p(dir.path())]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_catches_the_mutation() {
    let out = qhog(&["verify", "--sample", "100", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_passed"], true);

    let out = qhog(&["verify", "--sample", "100", "--mutate", "flip-commutator-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let rec = status_record(&out);
    let failed: Vec<&str> = rec["failures"].as_array().unwrap().iter().map(|f| f["check"].as_str().unwrap()).collect();
    assert!(failed.contains(&"three_way_agreement"));
}
