//! Run reports: a human-readable table and a deterministic JSON body.

use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub op: String,
    pub expected: String,
    pub outcome: String,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Wall time; shown in text reports only.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub matched: usize,
    pub mismatched: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub seed: u64,
    pub records: Vec<CheckRecord>,
}

#[derive(Serialize)]
struct Machine<'a> {
    seed: u64,
    checks: &'a [CheckRecord],
    summary: Summary,
    exit: i32,
}

impl Report {
    pub fn new(seed: u64, records: Vec<CheckRecord>) -> Report {
        Report { seed, records }
    }

    pub fn summary(&self) -> Summary {
        let matched = self.records.iter().filter(|r| r.matched).count();
        Summary { total: self.records.len(), matched, mismatched: self.records.len() - matched }
    }

    /// 0 when every check matched its expectation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.records.iter().all(|r| r.matched) {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let mark = if r.matched { "ok  " } else { "FAIL" };
            out.push_str(&format!(
                "{mark} {}/{} [{}] expected {}, got {} ({:.1} ms)\n",
                r.suite,
                r.name,
                r.op,
                r.expected,
                r.outcome,
                r.elapsed.as_secs_f64() * 1e3
            ));
            if let Some(d) = r.detail.as_ref().filter(|_| !r.matched) {
                out.push_str(&format!("     {d}\n"));
            }
        }
        let s = self.summary();
        out.push_str(&format!(
            "{} checks, {} matched, {} mismatched (seed {})\n",
            s.total, s.matched, s.mismatched, self.seed
        ));
        out
    }

    /// JSON without timings, so equal seeds and inputs give identical bytes.
    pub fn render_machine(&self) -> String {
        let body = Machine { seed: self.seed, checks: &self.records, summary: self.summary(), exit: self.exit_code() };
        let mut s = serde_json::to_string_pretty(&body).expect("report serializes");
        s.push('\n');
        s
    }
}
