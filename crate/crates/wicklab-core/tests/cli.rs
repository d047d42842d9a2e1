//! End-to-end tests of the `wicklab` binary: exit codes, output formats,
//! file writing, and error reporting.

use std::path::Path;
use std::process::{Command, Output};

const EXE: &str = env!("CARGO_BIN_EXE_wicklab");

/// A schema-valid, admissible single-mode cubic model.
const GOOD_MODEL: &str = r#"{
  "lambda": {
    "degree": 2,
    "v": [],
    "jv": [
      [1, {"terms": [{"modes": [[1, 2]], "re": 1.0, "im": 0.0}]}]
    ],
    "tail": null
  },
  "tail": {"explicit": [], "rule": {"kind": "zero"}},
  "quasifree_spec": null,
  "truncation": {"modes": 1, "cutoff": 16, "probe": 3},
  "suites": ["ccr", "equivalence"]
}
"#;

/// Schema-valid but not admissible: ΛJe₁ = :x₂: has no symmetric partner.
const INADMISSIBLE_MODEL: &str = r#"{
  "lambda": {
    "degree": 1,
    "v": [],
    "jv": [
      [1, {"terms": [{"modes": [[2, 1]], "re": 1.0, "im": 0.0}]}]
    ],
    "tail": null
  },
  "tail": {"explicit": [], "rule": {"kind": "zero"}},
  "quasifree_spec": null,
  "truncation": {"modes": 2, "cutoff": 12, "probe": 3},
  "suites": ["ccr"]
}
"#;

/// Schema-invalid: the image of a position direction is not constant.
const NONCONSTANT_V_MODEL: &str = r#"{
  "lambda": {
    "degree": 2,
    "v": [
      [1, {"terms": [{"modes": [[1, 1]], "re": 1.0, "im": 0.0}]}]
    ],
    "jv": [
      [1, {"terms": [{"modes": [[1, 2]], "re": 1.0, "im": 0.0}]}]
    ],
    "tail": null
  },
  "tail": {"explicit": [], "rule": {"kind": "zero"}},
  "quasifree_spec": null,
  "truncation": {"modes": 1, "cutoff": 16, "probe": 3},
  "suites": ["ccr"]
}
"#;

fn write_model(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn wicklab(args: &[&str]) -> Output {
    Command::new(EXE).args(args).output().unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

#[test]
fn suites_subcommand_lists_every_suite() {
    let out = wicklab(&["suites"]);
    assert_eq!(exit_code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let listed: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        listed,
        [
            "ccr",
            "standard_form",
            "generator",
            "weyl",
            "symplectic",
            "equivalence",
            "all"
        ]
    );
}

#[test]
fn passing_model_exits_zero_with_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "good.json", GOOD_MODEL);
    let out = wicklab(&["check", model.to_str().unwrap()]);
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["summary"]["failed"], 0);
    assert_eq!(report["suite"], "ccr+equivalence");
    assert!(report["summary"]["total"].as_u64().unwrap() > 0);
    // Model-declared suites are the default; naming one narrows the run.
    let narrowed = wicklab(&["check", model.to_str().unwrap(), "--suite", "ccr"]);
    assert_eq!(exit_code(&narrowed), 0);
    let narrowed: serde_json::Value = serde_json::from_slice(&narrowed.stdout).unwrap();
    assert_eq!(narrowed["suite"], "ccr");
}

#[test]
fn inadmissible_model_exits_one_and_sorts_failures_first() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "bad.json", INADMISSIBLE_MODEL);
    let out = wicklab(&["check", model.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["summary"]["failed"].as_u64().unwrap() >= 1);
    assert_eq!(report["records"][0]["passed"], false);
}

#[test]
fn text_format_prints_a_human_report() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "good.json", GOOD_MODEL);
    let out = wicklab(&[
        "check",
        model.to_str().unwrap(),
        "--format",
        "text",
        "--seed",
        "7",
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.starts_with("wicklab report — suite ccr+equivalence, seed 7"),
        "got: {}",
        stdout.lines().next().unwrap_or("")
    );
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn out_flag_writes_the_file_and_keeps_stdout_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "good.json", GOOD_MODEL);
    let target = dir.path().join("report.json");
    let out = wicklab(&[
        "check",
        model.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty());
    let written: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&target).unwrap()).unwrap();
    assert_eq!(written["summary"]["failed"], 0);
}

#[test]
fn schema_rejection_exits_two_and_names_the_violated_condition() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "nonconstant.json", NONCONSTANT_V_MODEL);
    let out = wicklab(&["check", model.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("wicklab: "), "got: {stderr}");
    assert!(stderr.contains("constant-on-V"), "got: {stderr}");
}

#[test]
fn parse_errors_report_the_byte_position() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "broken.json", "{\"lambda\": ");
    let out = wicklab(&["check", model.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("byte"), "got: {stderr}");
}

#[test]
fn unknown_suite_and_missing_file_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "good.json", GOOD_MODEL);
    let out = wicklab(&["check", model.to_str().unwrap(), "--suite", "bogus"]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("unknown suite"), "got: {stderr}");
    assert!(
        stderr.contains("ccr"),
        "the message should list valid names: {stderr}"
    );

    let gone = dir.path().join("absent.json");
    let out = wicklab(&["check", gone.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn malformed_environment_overrides_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "good.json", GOOD_MODEL);
    let out = Command::new(EXE)
        .args(["check", model.to_str().unwrap()])
        .env("WICKLAB_DEGREE_CAP", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("WICKLAB_DEGREE_CAP"), "got: {stderr}");
}

#[test]
fn seed_and_cutoff_flags_land_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "good.json", GOOD_MODEL);
    let out = wicklab(&[
        "check",
        model.to_str().unwrap(),
        "--seed",
        "99",
        "--cutoff",
        "20",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 99);
    // Reruns with the same flags are byte-identical.
    let again = wicklab(&[
        "check",
        model.to_str().unwrap(),
        "--seed",
        "99",
        "--cutoff",
        "20",
    ]);
    assert_eq!(out.stdout, again.stdout);
}
