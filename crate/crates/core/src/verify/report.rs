use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One named check with its measurement and tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Nothing to check; counts as a pass.
    pub vacuous: bool,
    pub instances: u64,
    pub failures: u64,
    pub measured: f64,
    pub tolerance: String,
    pub seed: u64,
    /// Index of the first failing instance under `seed`.
    pub first_failure: Option<u64>,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, seed: u64) -> Self {
        Check {
            name: name.to_string(),
            passed: true,
            vacuous: false,
            instances: 0,
            failures: 0,
            measured: 0.0,
            tolerance: String::new(),
            seed,
            first_failure: None,
            detail: String::new(),
        }
    }

    pub fn measured(mut self, v: f64) -> Self {
        self.measured = v;
        self
    }

    pub fn tolerance(mut self, t: impl Into<String>) -> Self {
        self.tolerance = t.into();
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn passed(mut self, ok: bool) -> Self {
        self.passed = ok;
        if !ok && self.failures == 0 {
            self.failures = 1;
        }
        self
    }

    /// Counts of checked items and failures; vacuous when nothing was
    /// checked.
    pub fn counted(mut self, instances: u64, failures: u64, first_failure: Option<u64>) -> Self {
        self.instances = instances;
        self.failures = failures;
        self.first_failure = first_failure;
        self.vacuous = instances == 0;
        self.passed = failures == 0;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        SuiteReport { schema_version: REPORT_SCHEMA_VERSION, suite: suite.to_string(), seed, checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite {} (seed {})", self.suite, self.seed);
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let _ = writeln!(s, "{:<w$}  {:<7}  {:>9}  {:>8}  {:>14}  tolerance", "check", "result", "instances", "failures", "measured");
        for c in &self.checks {
            let result = match (c.passed, c.vacuous) {
                (true, true) => "vacuous",
                (true, false) => "pass",
                (false, _) => "FAIL",
            };
            let _ = writeln!(
                s,
                "{:<w$}  {:<7}  {:>9}  {:>8}  {:>14.6e}  {}",
                c.name, result, c.instances, c.failures, c.measured, c.tolerance
            );
            if !c.detail.is_empty() {
                let _ = writeln!(s, "{:<w$}  {}", "", c.detail);
            }
            if let Some(i) = c.first_failure {
                let _ = writeln!(s, "{:<w$}  first failure: instance {i} under seed {}", "", c.seed);
            }
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "pass" } else { "FAIL" });
        s
    }
}
