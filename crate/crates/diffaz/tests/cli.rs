use std::path::PathBuf;
use std::process::{Command, Output};

use diffaz::{run_examples, verify_text, ScenarioError};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffaz")).args(args).output().expect("binary runs")
}

fn scenario_file(tag: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("diffaz-cli-{}-{tag}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

const QX: &str = r#"{"name": "qx", "kind": "base", "vars": ["x"], "derivatives": {"x": "1"}}"#;

#[test]
fn empty_scenario_reports_nothing() {
    let report = verify_text(r#"{"declarations": [], "checks": []}"#, 1).unwrap();
    assert!(report.records.is_empty());
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn inner_witness_of_e12() {
    let text = format!(
        r#"{{"declarations": [{QX}],
            "checks": [{{"name": "e12", "op": "inner_witness", "ring": "qx",
                         "witness": [["0", "1"], ["0", "0"]],
                         "expect": {{"value": [["0", "1"], ["0", "0"]]}}}}]}}"#
    );
    let report = verify_text(&text, 1).unwrap();
    assert_eq!(report.records.len(), 1);
    assert!(report.records[0].matched);
}

#[test]
fn input_errors() {
    let dangling = r#"{"declarations": [{"name": "m", "kind": "module", "ring": "nowhere", "connection": [["0"]]}]}"#;
    assert!(matches!(verify_text(dangling, 1), Err(ScenarioError::Declaration(_))));

    let dup = format!(r#"{{"declarations": [{QX}, {QX}]}}"#);
    assert!(matches!(verify_text(&dup, 1), Err(ScenarioError::Declaration(_))));

    let bad_check = format!(r#"{{"declarations": [{QX}], "checks": [{{"name": "m", "op": "dual", "module": "qx", "expect": "pass"}}]}}"#);
    assert!(matches!(verify_text(&bad_check, 1), Err(ScenarioError::Declaration(_))));

    let bad_expect = format!(r#"{{"declarations": [{QX}], "checks": [{{"name": "d", "op": "derivative", "ring": "qx", "of": "x", "expect": "maybe"}}]}}"#);
    assert!(matches!(verify_text(&bad_expect, 1), Err(ScenarioError::Parse(_))));

    let no_value = format!(
        r#"{{"declarations": [{QX}], "checks": [{{"name": "l", "op": "leibniz", "ring": "qx", "samples": 2, "expect": {{"value": "0"}}}}]}}"#
    );
    assert!(matches!(verify_text(&no_value, 1), Err(ScenarioError::Declaration(_))));

    assert!(matches!(verify_text(r#"{"declarations": [], "extra": 1}"#, 1), Err(ScenarioError::Parse(_))));
    assert!(matches!(run_examples(Some("nope"), 1), Err(ScenarioError::Parse(_))));
}

#[test]
fn expectations_are_judged() {
    let text = format!(
        r#"{{"declarations": [{QX}],
            "checks": [
              {{"name": "right value", "op": "derivative", "ring": "qx", "of": "x^2", "expect": {{"value": "2*x"}}}},
              {{"name": "wrong value", "op": "derivative", "ring": "qx", "of": "x^2", "expect": {{"value": "x"}}}},
              {{"name": "expected error", "op": "dlog", "ring": "qx", "of": "x", "expect": {{"error": "NotAUnit"}}}},
              {{"name": "other error", "op": "dlog", "ring": "qx", "of": "x", "expect": {{"error": "NoSolution"}}}},
              {{"name": "unexpected error", "op": "dlog", "ring": "qx", "of": "x", "expect": "pass"}}
            ]}}"#
    );
    let report = verify_text(&text, 1).unwrap();
    let matched: Vec<bool> = report.records.iter().map(|r| r.matched).collect();
    assert_eq!(matched, [true, false, true, false, false]);
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn exit_codes() {
    let ok = scenario_file("ok", r#"{"declarations": [], "checks": []}"#);
    assert_eq!(bin(&["verify", ok.to_str().unwrap()]).status.code(), Some(0));
    let broken = scenario_file("broken", "[");
    assert_eq!(bin(&["verify", broken.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "/nonexistent/scenario.json"]).status.code(), Some(2));
    assert_eq!(bin(&["examples", "--only", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["--report", "xml", "examples"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    std::fs::remove_file(ok).ok();
    std::fs::remove_file(broken).ok();
}

#[test]
fn only_filter_and_formats_agree() {
    let text = bin(&["examples", "--only", "dlog"]);
    let machine = bin(&["examples", "--only", "dlog", "--report", "machine"]);
    assert_eq!(text.status.code(), Some(0));
    assert_eq!(machine.status.code(), Some(0));
    let body: serde_json::Value = serde_json::from_slice(&machine.stdout).unwrap();
    let checks = body["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["suite"] == "dlog" && c["matched"] == true));
    let text = String::from_utf8(text.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ok ")).count(), checks.len());
    assert_eq!(body["summary"]["mismatched"], 0);
}

#[test]
fn seeds_change_random_cases_only() {
    let a = run_examples(Some("witness"), 1).unwrap();
    let b = run_examples(Some("witness"), 2).unwrap();
    assert_eq!(a.exit_code(), 0);
    assert_eq!(b.exit_code(), 0);
    assert_eq!(a.render_machine(), run_examples(Some("witness"), 1).unwrap().render_machine());
}
