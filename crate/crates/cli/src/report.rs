//! Machine-readable run reports.

use serde::Serialize;
use serde_json::Value;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            check: check.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub tool_version: String,
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, seed: Option<u64>) -> Self {
        Report {
            command: command.into(),
            inputs,
            results: Value::Object(Default::default()),
            verdicts: Vec::new(),
            tool_version: TOOL_VERSION.into(),
            seed,
        }
    }

    pub fn failures(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.passed).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let width = self.verdicts.iter().map(|v| v.check.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for v in &self.verdicts {
            let pad = width - v.check.chars().count();
            out.push_str(&format!(
                "{}{}  {}  {}\n",
                v.check,
                " ".repeat(pad),
                if v.passed { "PASS" } else { "FAIL" },
                v.detail
            ));
        }
        out
    }
}
