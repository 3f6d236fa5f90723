//! Scenario runner for `diffaz-core`: JSON scenario files, the bundled example suites and
//! their text and machine-readable reports.
//!
//! A scenario declares named rings, modules, algebras, covers, descent data and cochains,
//! then lists checks. Each check invokes one operation and states the expected outcome:
//! `"pass"`, `"fail"`, `{"value": …}` or `{"error": "Kind"}`. See the README for the format.

pub mod checks;
pub mod random;
pub mod report;
pub mod scenario;
pub mod suites;

use std::time::Instant;

use checks::{Done, Fault};
use report::{CheckRecord, Report};
use scenario::{Env, Expect, Scenario};

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Input errors. All of them end a run with exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("invalid scenario: {0}")]
    Parse(String),
    #[error("invalid declaration: {0}")]
    Declaration(String),
    #[error(transparent)]
    Core(#[from] diffaz_core::Error),
}

/// Build the declarations, then run every check in order. `suite` labels the records.
pub fn run_scenario(suite: &str, sc: &Scenario, seed: u64) -> Result<Vec<CheckRecord>, ScenarioError> {
    let env = Env::build(&sc.declarations)?;
    let mut records = Vec::with_capacity(sc.checks.len());
    for (idx, check) in sc.checks.iter().enumerate() {
        let mut rng = random::check_rng(seed, idx);
        let start = Instant::now();
        let result = checks::run(&check.op, &env, &mut rng);
        let elapsed = start.elapsed();
        let (outcome, matched, detail) = judge(&check.name, &check.expect, result)?;
        records.push(CheckRecord {
            suite: suite.to_string(),
            name: check.name.clone(),
            op: check.op.name().to_string(),
            expected: check.expect.to_string(),
            outcome,
            matched,
            detail,
            elapsed,
        });
    }
    Ok(records)
}

/// Compare a check result with its expectation: `(outcome, matched, detail)`.
fn judge(
    name: &str,
    expect: &Expect,
    result: Result<Done, Fault>,
) -> Result<(String, bool, Option<String>), ScenarioError> {
    match result {
        Err(Fault::Input(e)) => Err(ScenarioError::Declaration(format!("check `{name}`: {e}"))),
        Err(Fault::Core(e)) => {
            let matched = matches!(expect, Expect::Error(k) if k == e.kind());
            Ok((format!("error {}", e.kind()), matched, Some(e.to_string())))
        }
        Ok(done) => {
            let outcome = match &done.value {
                Some(v) => format!("{} {}", verdict(done.passed), v.to_json()),
                None => verdict(done.passed).to_string(),
            };
            let matched = match expect {
                Expect::Pass => done.passed,
                Expect::Fail => !done.passed,
                Expect::Error(_) => false,
                Expect::Value(want) => match &done.value {
                    Some(v) => v.matches(want),
                    None => {
                        return Err(ScenarioError::Declaration(format!(
                            "check `{name}`: operation produces no value to compare"
                        )))
                    }
                },
            };
            Ok((outcome, matched, done.detail))
        }
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// Parse and run a scenario file's contents.
pub fn verify_text(text: &str, seed: u64) -> Result<Report, ScenarioError> {
    let sc = scenario::parse(text)?;
    let suite = sc.name.clone().unwrap_or_else(|| "scenario".into());
    Ok(Report::new(seed, run_scenario(&suite, &sc, seed)?))
}

/// Run the bundled suites, or only `only` when given.
pub fn run_examples(only: Option<&str>, seed: u64) -> Result<Report, ScenarioError> {
    let selected: Vec<_> = match only {
        None => suites::SUITES.iter().collect(),
        Some(name) => {
            let s = suites::SUITES.iter().find(|s| s.name == name).ok_or_else(|| {
                ScenarioError::Parse(format!("unknown suite `{name}`; available: {}", suites::names().join(", ")))
            })?;
            vec![s]
        }
    };
    let mut records = Vec::new();
    for s in selected {
        let sc = scenario::parse(s.source).map_err(|e| ScenarioError::Parse(format!("suite {}: {e}", s.name)))?;
        records.extend(run_scenario(s.name, &sc, seed)?);
    }
    Ok(Report::new(seed, records))
}
