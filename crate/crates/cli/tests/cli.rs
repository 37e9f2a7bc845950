use std::path::Path;
use std::process::{Command, Output};

fn tracemono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracemono")).args(args).output().unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn schema() -> serde_json::Value {
    read_json(Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.schema.json")))
}

#[test]
fn run_writes_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = tracemono(&["run", "--suite", "L1M", "--dims", "2x2", "--trials", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out);
    assert!(jsonschema::validator_for(&schema()).unwrap().is_valid(&report));
    let check = &report["checks"][0];
    assert_eq!(check["check_id"], "L1M");
    assert_eq!(check["passes"], 10);
    assert_eq!(report["summary"]["exit_code"], 0);

    let snap = dir.path().join(check["worst_snapshot"].as_str().unwrap());
    let o = tracemono(&["replay", "--in", snap.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let replayed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(replayed["matches_stored"], true);
    assert_eq!(replayed["margin"], check["worst_margin"]);
}

#[test]
fn falsifier_counts_as_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = tracemono(&["run", "--suite", "schwarz_falsify:transpose2", "--dims", "2", "--trials", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&out);
    assert_eq!(report["verdicts"][0]["verdict"], "Falsified");
    assert_eq!(report["verdicts"][0]["as_expected"], true);
}

#[test]
fn corrupted_snapshot_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": 1, \"check_id\": ").unwrap();
    assert_eq!(tracemono(&["replay", "--in", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "{\"check_id\": \"L1M\"}").unwrap();
    assert_eq!(tracemono(&["replay", "--in", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("none.json");
    assert_eq!(tracemono(&["replay", "--in", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tampered_snapshot_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    tracemono(&["run", "--suite", "DPI", "--dims", "2x2", "--trials", "3", "--out", out.to_str().unwrap()]);
    let snap = dir.path().join("snapshots/DPI_2x2.json");
    let mut v = read_json(&snap);
    v["lhs"] = serde_json::json!(v["lhs"].as_f64().unwrap() + 1.0);
    std::fs::write(&snap, serde_json::to_string(&v).unwrap()).unwrap();
    assert_ne!(tracemono(&["replay", "--in", snap.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn classify_transpose() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("t.json");
    std::fs::write(&map, r#"{"family": "transpose", "d": 2}"#).unwrap();
    let o = tracemono(&["classify", "--map", map.to_str().unwrap(), "--trials", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // positivity can only be refuted by sampling, so it stays unknown
    assert_eq!(c["positive"]["verdict"], "Unknown");
    for class in ["two_positive", "completely_positive", "schwarz"] {
        assert_eq!(c[class]["verdict"], "Falsified", "{class}");
    }
    assert!((c["schwarz"]["min_eig"].as_f64().unwrap() + 1.0).abs() < 1e-10);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(tracemono(&["run", "--suite", "L1M", "--dims", ""]).status.code(), Some(2));
    assert_eq!(tracemono(&["run", "--suite", "nope", "--dims", "2"]).status.code(), Some(2));
    assert_eq!(tracemono(&["run", "--suite", "L1M", "--dims", "2", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(tracemono(&["run", "--suite", "L1M", "--families", "bogus"]).status.code(), Some(2));
    assert_eq!(tracemono(&["frobnicate"]).status.code(), Some(2));
}
