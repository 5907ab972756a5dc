use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().expect("lab runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = lab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_colour_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let c = dir.path().join("c.txt");
    assert!(lab(&["gnp", "--n", "60", "--gamma", "0.6", "--seed", "3", "--out", path(&g)]).status.success());
    let again = lab(&["gnp", "--n", "60", "--gamma", "0.6", "--seed", "3"]);
    assert_eq!(fs::read(&g).unwrap(), again.stdout);

    let census = ok_json(&["census", "--graph", path(&g), "--pattern", "K3", "--list"]);
    let k3 = &census[0];
    assert_eq!(k3["pattern"], "K3");
    assert_eq!(k3["count"].as_u64().unwrap() as usize, k3["copies"].as_array().unwrap().len());

    assert!(lab(&["colour", "--graph", path(&g), "--out", path(&c)]).status.success());
    let report = ok_json(&["analyze", "--graph", path(&g), "--colouring", path(&c)]);
    assert_eq!(report["obstructions"]["mono_triangles"].as_array().unwrap().len(), 0);

    let collages = ok_json(&["collage", "--graph", path(&g)]);
    let edges: usize = collages.as_array().unwrap().iter().map(|c| c["edges"].as_array().unwrap().len()).sum();
    let header = fs::read_to_string(&g).unwrap();
    let m: usize = header.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert_eq!(edges, m);

    let cores = ok_json(&["core", "--graph", path(&g), "--collage", "0"]);
    assert_eq!(cores.as_array().unwrap().len(), 1);

    for row in ok_json(&["vgc", "--graph", path(&g)]).as_array().unwrap() {
        assert!(row.get("colouring").is_some() || row.get("error").is_some());
    }
    let d = ok_json(&["density", "--graph", path(&g), "--p", "0.1"]);
    assert!(d["mu"].as_f64().unwrap() >= 0.0);
}

#[test]
fn threshold_reports_the_window() {
    let r = ok_json(&["threshold", "--n", "1000", "--gamma", "0.6"]);
    assert_eq!(r["regime"], "critical_window");
    assert!(r["value"].is_null());
    assert!(!lab(&["threshold", "--n", "1000"]).status.success());
}

#[test]
fn play_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let summary = ok_json(&[
        "play", "--n", "80", "--gamma", "0.55", "--q", "0.01", "--seed", "5", "--transcript", path(&t),
    ]);
    assert!(summary["outcome"]["result"].is_string());
    let report = ok_json(&["replay", "--transcript", path(&t)]);
    assert_eq!(report["reproduced"], true);

    // Flip one decision and the replay must fail.
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&t).unwrap()).unwrap();
    if let Some(d) = v["decisions"].as_array_mut().and_then(|d| d.first_mut()) {
        *d = Value::from(if d == "r" { "b" } else { "r" });
        fs::write(&t, v.to_string()).unwrap();
        let out = lab(&["replay", "--transcript", path(&t)]);
        assert_eq!(out.status.code(), Some(1));
    }
}

#[test]
fn sweep_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n": [50], "p": {"exponents": [0.55]}, "q": {"log_spaced": {"lo": 0.001, "hi": 0.3, "points": 4}},
            "trials": 30, "master_seed": 11}"#,
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(lab(&["sweep", "--config", path(&cfg), "--out", path(&a), "--workers", "1"]).status.success());
    assert!(lab(&["sweep", "--config", path(&cfg), "--out", path(&b), "--workers", "3"]).status.success());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("n,p,q,trials,successes,wilson_lo,wilson_hi,"));
}

#[test]
fn crossing_from_json_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("r.json");
    fs::write(
        &cfg,
        r#"{"n": [60], "p": {"exponents": [0.55]}, "q": {"values": [1e-6, 0.01, 0.5]},
            "trials": 40, "master_seed": 2, "format": "json"}"#,
    )
    .unwrap();
    assert!(lab(&["sweep", "--config", path(&cfg), "--out", path(&out)]).status.success());
    let rows: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    let c = ok_json(&["crossing", "--results", path(&out), "--bootstrap", "100"]);
    let q = c[0]["crossing"]["q_hat"].as_f64().expect("crossing estimated");
    assert!(1e-6 < q && q < 0.5);
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n": [50], "p": {"exponents": [0.55]}, "trials": 0, "master_seed": 0}"#).unwrap();
    let out = lab(&["sweep", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let missing = lab(&["census", "--graph", path(&dir.path().join("none.txt"))]);
    assert_eq!(missing.status.code(), Some(2));
    let online = ok_json(&["online", "--n", "6", "--budget", "15"]);
    assert_eq!(online["failed"], true);
}
