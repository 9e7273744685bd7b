use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ltr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltr"))
        .args(args)
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ltr-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_stable_half_is_transient() {
    let o = ltr(&["analyze", "--law", r#"{"family":"stable","alpha":0.5}"#]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["result"]["classification"], "transient");
    assert_eq!(r["seed"], 0);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config"]["criteria"]["series_terms"], 1_000_000);
}

#[test]
fn analyze_brownian_is_recurrent() {
    let o = ltr(&["analyze", "--law", r#"{"family":"stable","alpha":2}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["classification"], "recurrent");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        ltr(&["analyze", "--law", r#"{"family":"stabel","alpha":0.5}"#])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ltr(&["analyze"]).status.code(), Some(1));
    assert_eq!(ltr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        ltr(&["analyze", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ltr(&["analyze", "--law", r#"{"family":"stable","alpha":3}"#])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn undecided_exits_two() {
    // With the fit gate closed only (1.1) and (1.2) remain, and neither
    // decides for this lattice law.
    let dir = scratch("unknown");
    let cfg = dir.join("c.toml");
    std::fs::write(
        &cfg,
        "[law]\nfamily = \"multi-index\"\nalpha = 0.5\nbeta = 1.5\n[criteria]\ncf_gate = 0.0\n",
    )
    .unwrap();
    let o = ltr(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["result"]["classification"], "unknown");
}

#[test]
fn analyze_csv_lists_evidence() {
    let o = ltr(&[
        "analyze",
        "--law",
        r#"{"family":"table","masses":[0.3]}"#,
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("criterion,implication,status"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn reports_reproduce_from_embedded_config() {
    let dir = scratch("repro");
    let o = ltr(&[
        "simulate",
        "--law",
        r#"{"family":"power-law-lattice","alpha":0.5,"normalize":true}"#,
        "--seed",
        "7",
        "--replicas",
        "50",
        "--steps",
        "500",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read_to_string(dir.join("simulate.json")).unwrap();
    let report: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["result"]["diagnostic"], true);
    assert!(std::fs::read_to_string(dir.join("simulate.csv"))
        .unwrap()
        .starts_with("replica,sojourn"));

    let again = scratch("repro-again");
    let o = ltr(&[
        "simulate",
        "--config",
        dir.join("simulate.json").to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(again.join("simulate.json")).unwrap(),
        first
    );
}

#[test]
fn toml_config_is_read() {
    let dir = scratch("toml");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 3\n[law]\nfamily = \"nearest-neighbour\"\nmass = 1.0\n[resistance]\nradii = [4, 8, 16]\n",
    )
    .unwrap();
    let o = ltr(&["resistance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["seed"], 3);
    let points = r["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    for p in points {
        let n = p["radius"].as_f64().unwrap();
        assert!((p["r_eff"].as_f64().unwrap() - n / 2.0).abs() < 1e-10);
    }
}

#[test]
fn flow_checks_the_bound_chain() {
    let o = ltr(&[
        "flow",
        "--law",
        r#"{"family":"power-law-lattice","alpha":0.5}"#,
        "--i-max",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["result"]["chain_holds"], true);
    assert_eq!(r["result"]["verification"]["source_divergence"]["num"], 1);
}

#[test]
fn discretize_reports_tables() {
    let o = ltr(&[
        "discretize",
        "--law",
        r#"{"family":"gaussian"}"#,
        "--deltas",
        "0.5,0.25",
        "--tests",
        "damped-cos-1",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("delta,test_id,abs_error,order_estimate"));
    assert!(text.contains("damped-cos-1"));
}

#[test]
fn demos_pass() {
    let o = ltr(&["demo", "stable-sweep"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["passed"], 8);
    assert!(String::from_utf8_lossy(&o.stderr).contains("8/8"));

    let o = ltr(&["demo", "multi-index", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    let s = &r["result"]["scenarios"];
    assert_eq!(s[0]["criterion_11"], "diverges");
    assert_eq!(s[0]["even_chain"], "converges");
    assert_eq!(s[0]["classification"], "transient");
    assert_eq!(s[1]["criterion_11"], "converges");
}
