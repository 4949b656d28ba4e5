use nsit_core::scenarios::{by_name, to_document, Expectation, Provenance};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn nsit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsit")).args(args).output().expect("run nsit")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_bell_reports_half() {
    let out = nsit(&["run", "--scenario", "bell", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["report"]["w_a"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn run_false_positive() {
    let out = nsit(&["run", "--scenario", "classical-false-positive"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["report"]["w_b"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["report"]["w_c"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn unknown_scenario_is_input_error() {
    let out = nsit(&["run", "--scenario", "no-such"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("nsit: input:"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nsit(&["run"]).status.code(), Some(1));
    assert_eq!(nsit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nsit(&["verify", "--only", "nope"]).status.code(), Some(1));
    assert_eq!(nsit(&["run", "--scenario", "bell", "--tolerance", "w_a"]).status.code(), Some(1));
    assert_eq!(nsit(&["run", "--scenario", "bell", "--tolerance", "missing=1"]).status.code(), Some(1));
}

#[test]
fn run_from_document_and_failed_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = to_document(&by_name::<f64>("bell").unwrap());
    let path = write(dir.path(), "bell.json", &serde_json::to_string(&doc).unwrap());
    assert_eq!(nsit(&["run", "--config", &path]).status.code(), Some(0));

    doc.expected.push(Expectation::new("w_a", 0.25, 1e-12, Provenance::Derived));
    let path = write(dir.path(), "wrong.json", &serde_json::to_string(&doc).unwrap());
    let out = nsit(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));

    let path = write(dir.path(), "broken.json", "{\"schema_version\": 1}");
    assert_eq!(nsit(&["run", "--config", &path]).status.code(), Some(1));
}

#[test]
fn run_csv_has_registered_header() {
    let out = nsit(&["run", "--scenario", "epsilon-mixture", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "section,quantity,value,expected,tolerance,provenance,passed");
    assert!(text.lines().any(|l| l.starts_with("report,w_a,")));
}

fn sweep_rows(dir: &Path, spec: &str) -> (Option<i32>, Vec<csv::StringRecord>) {
    let path = write(dir, "sweep.json", spec);
    let out = nsit(&["sweep", "--config", &path, "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().cloned().unwrap_or_default();
    if out.status.success() {
        assert_eq!(
            header.iter().collect::<Vec<_>>(),
            ["parameter", "value", "p1", "p2", "p3", "p4", "w_a", "w_b", "w_c", "w_a_bound_slack", "w_b_bound_slack"]
        );
    }
    (out.status.code(), reader.records().map(Result::unwrap).collect())
}

#[test]
fn epsilon_sweep_tracks_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rows) = sweep_rows(
        dir.path(),
        r#"{"scenario": "epsilon-mixture", "parameter": "eps", "start": 0.0, "stop": 0.3, "steps": 7, "dim": 2}"#,
    );
    assert_eq!(code, Some(0));
    assert_eq!(rows.len(), 7);
    for row in rows {
        let eps: f64 = row[1].parse().unwrap();
        let w: f64 = row[6].parse().unwrap();
        assert!((w - eps / 2.0).abs() < 1e-10);
        assert!(row[2].is_empty());
    }
}

#[test]
fn dimension_sweep_tracks_gap() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rows) =
        sweep_rows(dir.path(), r#"{"scenario": "max-coherent", "parameter": "d", "start": 2, "stop": 5}"#);
    assert_eq!(code, Some(0));
    assert_eq!(rows.len(), 4);
    for row in rows {
        let d: f64 = row[1].parse().unwrap();
        let w: f64 = row[6].parse().unwrap();
        assert!((w - (1.0 - 1.0 / d)).abs() < 1e-10);
    }
}

#[test]
fn empty_sweep_range_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = sweep_rows(
        dir.path(),
        r#"{"scenario": "epsilon-mixture", "parameter": "eps", "start": 0.3, "stop": 0.0, "steps": 4}"#,
    );
    assert_eq!(code, Some(1));
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.json", r#"{"scenario": "born-rotation", "parameter": "theta", "start": 0, "stop": 1, "steps": 5}"#);
    let a = nsit(&["sweep", "--config", &spec, "--format", "csv", "--seed", "3"]);
    let b = nsit(&["sweep", "--config", &spec, "--format", "csv", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_single_diamond_check() {
    let out = nsit(&["verify", "--only", "diamond", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    let search = &checks[0]["parts"][0];
    assert!((search["value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-3);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("PASS"));
}

#[test]
fn verify_exit_code_matches_parts() {
    let out = nsit(&["verify", "--only", "bell", "--tolerance", "bell=0", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,criterion,label,class,comparison,value,target,tolerance,slack,passed"));
    let all_exact = text.lines().skip(1).all(|l| l.ends_with(",true"));
    assert_eq!(out.status.code(), Some(if all_exact { 0 } else { 2 }));
    let out = nsit(&["verify", "--only", "baseline", "--tolerance", "baseline.probe=-1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn list_names() {
    let out = nsit(&["list"]);
    let v = json(&out);
    assert!(v["scenarios"].as_array().unwrap().iter().any(|s| s == "bell"));
    assert_eq!(v["checks"].as_array().unwrap().len(), 13);
    let out = nsit(&["list", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("kind,name\n"));
}
