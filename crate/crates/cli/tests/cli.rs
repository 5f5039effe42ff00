//! End-to-end tests of the `scone` binary: exit codes, canonical output,
//! determinism across worker counts, golden comparison, selections, and
//! report re-verification.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scone"))
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root resolves")
}

fn model_path(name: &str) -> PathBuf {
    workspace().join("models").join(name)
}

fn run_args(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scone-cli-test-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn goldens_match_with_expected_exit_codes() {
    let goldens = workspace().join("goldens");
    for (name, code) in [
        ("set-2chain", 0),
        ("set-3chain", 0),
        ("set-diamond", 2),
        ("arrow-mixed", 0),
    ] {
        let model = model_path(&format!("{name}.json"));
        let out = run_args(&[
            "run",
            model.to_str().unwrap(),
            "--golden",
            goldens.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(code),
            "{name}: unexpected exit; stderr: {}",
            stderr_str(&out)
        );
        let report: Value = serde_json::from_str(&stdout_str(&out)).expect("report is JSON");
        assert_eq!(report["schema"], Value::from(1u64), "{name}: schema tag");
        assert_eq!(report["model"], Value::String(name.to_string()));
    }
}

#[test]
fn reports_are_byte_identical_across_worker_counts() {
    let model = model_path("set-2chain.json");
    let one = run_args(&["run", model.to_str().unwrap(), "--jobs", "1"]);
    let eight = run_args(&["run", model.to_str().unwrap(), "--jobs", "8"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(eight.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout, "reports differ across --jobs");
}

#[test]
fn model_files_are_canonical_and_canon_is_idempotent() {
    for name in [
        "set-2chain.json",
        "set-3chain.json",
        "set-diamond.json",
        "arrow-mixed.json",
        "broken-lattice.json",
    ] {
        let path = model_path(name);
        let disk = fs::read_to_string(&path).expect("model file reads");
        let out = run_args(&["canon", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: canon exit");
        let canon = stdout_str(&out);
        assert_eq!(canon, disk, "{name}: file on disk is not canonical");
        assert!(canon.ends_with('\n'), "{name}: canonical text ends with LF");
    }
}

#[test]
fn broken_lattice_is_rejected_naming_the_axiom() {
    let model = model_path("broken-lattice.json");
    let out = run_args(&["run", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(
        err.contains("absorption"),
        "expected the failing axiom in: {err}"
    );
}

#[test]
fn schema_errors_carry_a_json_path() {
    let dir = scratch_dir("schema");
    let path = dir.join("no-lattice.json");
    fs::write(
        &path,
        r#"{"base": {"objects": 1, "morphisms": [{"src": 0, "tgt": 0}], "identities": [0], "composition": []}}"#,
    )
    .unwrap();
    let out = run_args(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("schema error"), "got: {err}");
    assert!(err.contains("lattice"), "got: {err}");

    let bad_json = dir.join("bad.json");
    fs::write(&bad_json, "{ not json").unwrap();
    let out = run_args(&["run", bad_json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("schema error"));
}

#[test]
fn starved_budget_exits_two_with_budget_records() {
    let model = model_path("set-2chain.json");
    let out = run_args(&["run", model.to_str().unwrap(), "--budget", "50"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_str(&out));
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let budgeted: Vec<&Value> = checks
        .iter()
        .filter(|c| c.get("error").is_some())
        .collect();
    assert!(!budgeted.is_empty(), "expected at least one budget record");
    for c in &budgeted {
        assert_eq!(c["verdict"], Value::Null, "budget records have no verdict");
        assert!(c["error"]
            .as_str()
            .unwrap()
            .contains("budget exceeded"));
    }
}

#[test]
fn named_selection_runs_exactly_that_check() {
    let model = model_path("set-2chain.json");
    let out = run_args(&["run", model.to_str().unwrap(), "condition.strict"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "condition.strict");
    assert_eq!(checks[0]["verdict"], Value::Bool(true));
    assert_eq!(
        report["selection"],
        Value::Array(vec![Value::String("condition.strict".into())])
    );
}

#[test]
fn unknown_selection_is_rejected() {
    let model = model_path("set-2chain.json");
    let out = run_args(&["run", model.to_str().unwrap(), "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("unknown selection"));
}

#[test]
fn markdown_emission_renders_the_table() {
    let model = model_path("set-2chain.json");
    let out = run_args(&["run", model.to_str().unwrap(), "conditions", "--emit", "md"]);
    assert_eq!(out.status.code(), Some(0));
    let md = stdout_str(&out);
    assert!(md.contains("# Check report for model `set-2chain`"));
    assert!(md.contains("| check | verdict | witness | counts | notes |"));
    assert!(md.contains("| condition.phoa | false |"));
    assert!(md.contains("Advisory:"));
}

#[test]
fn cli_formula_is_checked_and_reported() {
    let model = model_path("set-2chain.json");
    let out = run_args(&[
        "run",
        model.to_str().unwrap(),
        "formula",
        "--formula",
        "forall i:J. meet(i, one) = i",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "formula.cli");
    assert_eq!(checks[0]["verdict"], Value::Bool(true));
}

#[test]
fn verify_report_accepts_fresh_and_rejects_tampered() {
    let model = model_path("set-2chain.json");
    let golden = workspace().join("goldens/set-2chain.all.json");
    let out = run_args(&[
        "verify-report",
        model.to_str().unwrap(),
        golden.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    assert!(stdout_str(&out).contains("report verified"));

    let mut report: Value =
        serde_json::from_str(&fs::read_to_string(&golden).unwrap()).unwrap();
    for c in report["checks"].as_array_mut().unwrap() {
        if c["name"] == "condition.strict" {
            c["verdict"] = Value::Bool(false);
        }
    }
    let dir = scratch_dir("tamper");
    let tampered = dir.join("tampered.json");
    fs::write(&tampered, serde_json::to_string(&report).unwrap()).unwrap();
    let out = run_args(&[
        "verify-report",
        model.to_str().unwrap(),
        tampered.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("condition.strict"), "got: {err}");
}

#[test]
fn golden_mismatch_is_a_validation_error() {
    let dir = scratch_dir("golden");
    let model = model_path("set-2chain.json");
    let wrong = dir.join("set-2chain.all.json");
    fs::write(&wrong, "{}\n").unwrap();
    let out = run_args(&[
        "run",
        model.to_str().unwrap(),
        "--golden",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("differs from golden"));
}

#[test]
fn missing_model_file_is_a_validation_error() {
    let out = run_args(&["run", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("cannot read"));
}

#[test]
fn file_checks_appear_under_the_file_group() {
    let model = model_path("set-2chain.json");
    let out = run_args(&["run", model.to_str().unwrap(), "file"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["file.interval-closed-proper", "file.two-valued"],
        "file-group selection"
    );
}
