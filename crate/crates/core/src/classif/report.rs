use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::expr::Verdict;

pub const SCHEMA: &str = "wavesym.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Undecided,
    Fail,
}

impl Status {
    pub fn of(v: &Verdict) -> Status {
        match v {
            Verdict::Zero => Status::Pass,
            Verdict::Nonzero { .. } => Status::Fail,
            Verdict::Undecided { .. } => Status::Undecided,
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Undecided => "undecided",
            Status::Fail => "fail",
        }
    }
}

/// One sub-verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Pass, detail: None }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Fail, detail: Some(detail.into()) }
    }

    pub fn of_bool(name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Check {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, detail())
        }
    }

    /// Zero-test verdict on `residual`; the residual is recorded unless it vanished.
    pub fn of_verdict(name: impl Into<String>, v: &Verdict, residual: impl FnOnce() -> String) -> Check {
        let status = Status::of(v);
        let detail = match v {
            Verdict::Zero => None,
            Verdict::Nonzero { point, value } => Some(format!(
                "residual {} = {value} at {}",
                residual(),
                point.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
            )),
            Verdict::Undecided { samples, .. } => Some(format!("undecided after {samples} samples: {}", residual())),
        };
        Check { name: name.into(), status, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRecord {
    pub sample: String,
    pub dimension: usize,
}

/// Verdicts for one catalog entry or one verification item.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dimensions_within_ansatz: Vec<DimRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl CaseReport {
    pub fn new(id: impl Into<String>) -> CaseReport {
        CaseReport {
            id: id.into(),
            status: Status::Pass,
            checks: Vec::new(),
            expected_dimension: None,
            dimensions_within_ansatz: Vec::new(),
            warnings: Vec::new(),
            wall_ms: None,
        }
    }

    pub fn push(&mut self, c: Check) {
        if c.status == Status::Undecided {
            self.warnings.push(format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()));
        }
        self.status = self.status.max(c.status);
        self.checks.push(c);
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status != Status::Pass).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub undecided: usize,
}

/// Machine-readable verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub suite: String,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, cases: Vec<CaseReport>) -> VerificationReport {
        let mut r = VerificationReport { schema: SCHEMA.into(), suite: suite.into(), cases, summary: Summary::default() };
        r.resummarize();
        r
    }

    pub fn resummarize(&mut self) {
        let mut s = Summary { total: self.cases.len(), ..Summary::default() };
        for c in &self.cases {
            match c.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Undecided => s.undecided += 1,
            }
        }
        self.summary = s;
    }

    /// Concatenate several reports under a new suite name.
    pub fn merge(suite: impl Into<String>, parts: Vec<VerificationReport>) -> VerificationReport {
        let cases = parts
            .into_iter()
            .flat_map(|p| {
                let name = p.suite;
                p.cases.into_iter().map(move |mut c| {
                    c.id = format!("{name}/{}", c.id);
                    c
                })
            })
            .collect();
        VerificationReport::new(suite, cases)
    }

    pub fn status(&self) -> Status {
        self.cases.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text table, one line per case.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let w = self.cases.iter().map(|c| c.id.len()).max().unwrap_or(2).max(2);
        let _ = writeln!(out, "{:<w$}  {:<9}  {:>8}  notes", "id", "status", "dim");
        for c in &self.cases {
            let dim = match (c.expected_dimension, c.dimensions_within_ansatz.first()) {
                (Some(e), Some(_)) => {
                    let got: Vec<String> = c.dimensions_within_ansatz.iter().map(|d| d.dimension.to_string()).collect();
                    format!("{}/{e}", got.join(","))
                }
                (Some(e), None) => format!("-/{e}"),
                _ => "-".into(),
            };
            let notes: Vec<String> = c.failures().iter().map(|k| format!("{} {}", k.name, k.status.as_str())).collect();
            let _ = writeln!(out, "{:<w$}  {:<9}  {:>8}  {}", c.id, c.status.as_str(), dim, notes.join("; "));
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{}: {} entries, {} passed, {} failed, {} undecided (dimensions are within the declared ansatz)",
            self.suite, s.total, s.passed, s.failed, s.undecided
        );
        out
    }
}
