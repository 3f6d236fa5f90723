//! Pass/fail reports for multi-part identity checks.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckItem {
    pub label: String,
    pub passed: bool,
    /// First counterexample, when the item failed.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub name: String,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport { name: name.into(), items: Vec::new() }
    }

    pub fn pass(&mut self, label: impl Into<String>) {
        self.items.push(CheckItem { label: label.into(), passed: true, detail: None });
    }

    pub fn fail(&mut self, label: impl Into<String>, detail: impl Into<String>) {
        self.items.push(CheckItem { label: label.into(), passed: false, detail: Some(detail.into()) });
    }

    /// Record `label` as passed when `counterexample` is `None`.
    pub fn record(&mut self, label: impl Into<String>, counterexample: Option<String>) {
        match counterexample {
            None => self.pass(label),
            Some(d) => self.fail(label, d),
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| !i.passed)
    }

    pub fn merge(&mut self, other: CheckReport) {
        for mut item in other.items {
            item.label = alloc::format!("{}: {}", other.name, item.label);
            self.items.push(item);
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.items.iter().filter(|i| i.passed).count();
        write!(f, "{}: {}/{} passed", self.name, ok, self.items.len())?;
        if let Some(item) = self.first_failure() {
            write!(f, "; first failure `{}`", item.label)?;
            if let Some(d) = &item.detail {
                write!(f, ": {d}")?;
            }
        }
        Ok(())
    }
}
