use tracemono::ensembles::FamilyKind;
use tracemono::suite::{replay_file, run_suite, square_dims, SuiteConfig};

fn schema() -> serde_json::Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn config(suites: &[&str], out: Option<std::path::PathBuf>) -> SuiteConfig {
    SuiteConfig {
        suites: suites.iter().map(|s| s.to_string()).collect(),
        dims: square_dims(&[2, 3]),
        trials: 4,
        master_seed: 11,
        tol_rel: 1e-8,
        families: FamilyKind::ALL.to_vec(),
        output: out,
        force_out_of_hypothesis: false,
    }
}

#[test]
fn report_matches_schema_and_snapshots_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let report = run_suite(&config(&["all"], Some(path.clone()))).unwrap();
    assert_eq!(report.exit_code(), 0);

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&json).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");

    let mut replayed = 0;
    for c in &report.checks {
        if let Some(rel) = &c.worst_snapshot {
            let r = replay_file(&dir.path().join(rel)).unwrap();
            assert!(r.matches, "{rel}");
            replayed += 1;
        }
    }
    assert!(replayed > 50, "{replayed}");
}

#[test]
fn forced_run_also_matches_schema() {
    let report = run_suite(&SuiteConfig { force_out_of_hypothesis: true, ..config(&["L1M", "tracialA", "DPI"], None) }).unwrap();
    let json = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert!(jsonschema::validator_for(&schema()).unwrap().is_valid(&json));
    assert!(report.checks.iter().any(|c| c.exploratory > 0));
    assert_eq!(report.summary.hypothesis_failures, 0);
}

#[test]
fn schema_rejects_tampering() {
    let report = run_suite(&config(&["L1M"], None)).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema()).unwrap();
    assert!(validator.is_valid(&json));
    json["schema"] = "tracemono-report/0".into();
    assert!(!validator.is_valid(&json));
}
