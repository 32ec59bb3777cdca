//! The command-line front end: artifacts, round trips and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use isoweights::fixtures;
use isoweights::verify::verify;
use isoweights::WeightSystem;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoweights")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn fixture_then_verify_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("v5.json");
    let out = run(&["fixture", "v5"]);
    assert!(out.status.success());
    std::fs::write(&file, &out.stdout).unwrap();

    let report = stdout_json(&run(&["verify", file.to_str().unwrap()]));
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["localization"]["c1"], 2);

    let parsed = WeightSystem::from_json_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed, fixtures::v5());
    assert_eq!(report, verify(&fixtures::v5()).unwrap().to_json());
}

#[test]
fn fixture_parameters() {
    let gr = stdout_json(&run(&["fixture", "grassmannian", "--xi", "2,1"]));
    assert_eq!(gr["points"][3]["weights"], serde_json::json!([-3, -2, -1]));
    let s = stdout_json(&run(&["fixture", "s2xs2", "--a", "2", "--b", "3"]));
    assert_eq!(s["points"].as_array().unwrap().len(), 4);
    assert_eq!(run(&["fixture", "s2xs2", "--a", "2"]).status.code(), Some(2));
    assert_eq!(run(&["fixture", "cp", "--xi", "4,2,0"]).status.code(), Some(1));
}

#[test]
fn enumerate_counts() {
    let doc = stdout_json(&run(&["enumerate", "--n", "3", "--minimal", "--filter", "nonneg"]));
    assert_eq!(doc["count"], 7);
    let doc = stdout_json(&run(&["enumerate", "--n", "3", "--minimal", "--dedup", "none"]));
    assert_eq!(doc["count"], 9);
}

#[test]
fn classify_writes_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&["classify", "--n", "3", "--minimal", "--filter", "nonneg", "--out", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["classify.json", "audit.json", "table.txt"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let report: Value = serde_json::from_slice(&std::fs::read(a.join("classify.json")).unwrap()).unwrap();
    assert_eq!(report["families"].as_array().unwrap().len(), 4);
    let audit: Value = serde_json::from_slice(&std::fs::read(a.join("audit.json")).unwrap()).unwrap();
    assert_eq!(audit["graph_classes"], 7);
    assert_eq!(audit["graphs"].as_array().unwrap().len(), 7);
    let table = std::fs::read_to_string(a.join("table.txt")).unwrap();
    assert!(table.contains("4 families"));
    assert!(table.contains("P0: {b[1], b[2], b[3]}"));
}

#[test]
fn classify_resumes_from_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.ck");
    let out_dir = dir.path().join("out");
    let args = |resume: &Path| {
        vec![
            "classify".to_string(),
            "--n".into(),
            "3".into(),
            "--minimal".into(),
            "--resume".into(),
            resume.to_str().unwrap().into(),
            "--out".into(),
            out_dir.to_str().unwrap().into(),
        ]
    };
    let a: Vec<String> = args(&ck);
    let refs: Vec<&str> = a.iter().map(String::as_str).collect();
    assert!(run(&refs).status.success());
    let first = std::fs::read(out_dir.join("classify.json")).unwrap();
    assert!(ck.exists());
    assert!(run(&refs).status.success());
    assert_eq!(std::fs::read(out_dir.join("classify.json")).unwrap(), first);
}

#[test]
fn hattori_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cp4.json");
    std::fs::write(&file, fixtures::cp(&[4, 3, 2, 1, 0]).unwrap().to_json().to_string()).unwrap();
    let r = stdout_json(&run(&["hattori", file.to_str().unwrap(), "--k0", "5"]));
    assert_eq!(r["laurent_ok"], Value::Bool(true));
    assert_eq!(r["r_values_at_1"], serde_json::json!(["1", "0", "0", "0", "0"]));
    assert_eq!(r["dim8"]["C1"], 5);

    let scan = stdout_json(&run(&["scan-c1eq1", "--lmax", "60"]));
    let mut ls: Vec<i64> = scan["solutions"].as_array().unwrap().iter().map(|s| s["l"].as_i64().unwrap()).collect();
    ls.dedup();
    assert_eq!(ls, vec![15, 25, 40, 60]);
}

#[test]
fn exit_codes() {
    // Unbalanced profile: schema error.
    assert_eq!(run(&["enumerate", "--n", "3", "--lambdas", "0,1,1"]).status.code(), Some(2));
    // Malformed input file: schema error.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 2, \"points\": 7}").unwrap();
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).status.code(), Some(2));
    // No graph realizes the profile: infeasible.
    assert_eq!(run(&["enumerate", "--n", "2", "--lambdas", "1,1", "--filter", "positive"]).status.code(), Some(3));
    // Nonnegative search refused for a negative target: infeasible.
    assert_eq!(run(&["classify", "--n", "4", "--lambdas", "2,2"]).status.code(), Some(3));
    // Missing file: other error.
    assert_eq!(run(&["verify", "/nonexistent/ws.json"]).status.code(), Some(1));
}
