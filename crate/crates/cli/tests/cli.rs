use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const Z_SQUARED: &str = r#"{"n": 1, "terms": [{"p": [2], "q": [0], "re": "1", "im": "0"}]}"#;

fn cchaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cchaos")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cchaos(&[]).status.code(), Some(1));
    assert_eq!(cchaos(&["bogus"]).status.code(), Some(1));
    assert_eq!(cchaos(&["--help"]).status.code(), Some(0));
    assert_eq!(cchaos(&["--version"]).status.code(), Some(0));
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(cchaos(&["moments", "--poly", missing.to_str().unwrap()]).status.code(), Some(2));
    let poly = write(dir.path(), "f.json", Z_SQUARED);
    let sigma = write(dir.path(), "s.json", r#"[["-1"]]"#);
    assert_eq!(cchaos(&["bound", "--poly", &poly, "--sigma", &sigma]).status.code(), Some(2));
    let not_json = write(dir.path(), "x.json", "{");
    assert_eq!(cchaos(&["moments", "--poly", &not_json]).status.code(), Some(2));
}

#[test]
fn bound_for_z_squared() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "f.json", Z_SQUARED);
    let sigma = write(dir.path(), "s.json", r#"[["2"]]"#);
    let out = cchaos(&["bound", "--poly", &poly, "--sigma", &sigma]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["command"], "bound");
    assert_eq!(v["result"]["exact"]["psi3"], 16.0);
    assert_eq!(v["result"]["exact"]["psi1"], 0.0);
    assert_eq!(v["result"]["proof_chain_holds"], true);
    let bound = v["result"]["exact"]["thm4_bound"].as_f64().unwrap();
    assert!((bound - 3.863703305156273).abs() < 1e-12);
}

#[test]
fn exact_moments_document() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "f.json", Z_SQUARED);
    let v = json(&cchaos(&["moments", "--poly", &poly]));
    assert_eq!(v["result"]["route"], "exact");
    assert_eq!(v["result"]["moments"]["abs4"][0][0], 24.0);
}

#[test]
fn sample_then_wasserstein() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = write(dir.path(), "s.json", r#"[["2"]]"#);
    let out = cchaos(&["sample", "--sigma", &sigma, "--count", "64", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("re_1,im_1"));
    assert_eq!(text.lines().count(), 65);
    let a = write(dir.path(), "a.csv", &text);
    let same = json(&cchaos(&["wasserstein", "--a", &a, "--b", &a]));
    assert_eq!(same["result"]["value"], 0.0);
    let vs_law = cchaos(&["wasserstein", "--a", &a, "--sigma", &sigma, "--repeats", "3"]);
    assert_eq!(vs_law.status.code(), Some(0));
    assert!(json(&vs_law)["result"]["mean"].as_f64().unwrap() > 0.0);
    assert_eq!(cchaos(&["wasserstein", "--a", &a]).status.code(), Some(1));
}

#[test]
fn verify_passes_and_writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = cchaos(&["verify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(doc["tool"], "cchaos");
    assert_eq!(doc["result"]["suites"].as_array().unwrap().len(), 9);
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"name": "sos", "generator": {"kind": "sum_of_squares"}, "dimension": 1,
            "n_grid": [1, 4], "target_sigma": [["2"]], "seed": 1}"#,
    );
    let out_dir = dir.path().join("out");
    let out = cchaos(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("sos.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[1], "n,psi1,psi2,psi3,thm4_bound,thm1_bound,empirical_w1,w1_se");
    assert_eq!(lines.len(), 4);
    assert!(out_dir.join("sos.json").exists());
    let bad = write(dir.path(), "bad.json", r#"{"name": "x"}"#);
    assert_eq!(cchaos(&["run", "--config", &bad]).status.code(), Some(2));
}
