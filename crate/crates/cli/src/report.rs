//! Check records, convention flags and their text and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never fails a run.
    Flagged,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    /// The formula or statement being checked.
    pub anchor: String,
    pub status: Status,
    pub measured: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A notational point where the stated formula and the computed one differ.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionFlag {
    pub id: String,
    pub anchor: String,
    pub stated: String,
    pub resolved: String,
    pub evidence: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub flagged: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub flags: Vec<ConventionFlag>,
    /// Descriptive output (series traces, schedules, histograms).
    pub data: serde_json::Map<String, Value>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            command: command.into(),
            config,
            checks: Vec::new(),
            flags: Vec::new(),
            data: serde_json::Map::new(),
            summary: Summary::default(),
        }
    }

    pub fn check(&mut self, id: &str, anchor: &str, pass: bool, measured: impl Serialize) {
        self.push(
            id,
            anchor,
            if pass { Status::Pass } else { Status::Fail },
            measured,
            None,
        );
    }

    pub fn push(&mut self, id: &str, anchor: &str, status: Status, measured: impl Serialize, detail: Option<String>) {
        match status {
            Status::Pass => self.summary.passed += 1,
            Status::Fail => self.summary.failed += 1,
            Status::Flagged => self.summary.flagged += 1,
        }
        self.checks.push(CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            status,
            measured: serde_json::to_value(measured).expect("serializable"),
            detail,
        });
    }

    pub fn flag(&mut self, flag: ConventionFlag) {
        if !self.flags.iter().any(|f| f.id == flag.id) {
            self.flags.push(flag);
        }
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        self.data
            .insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    /// Appends another report's records under this one.
    pub fn absorb(&mut self, other: Report) {
        for c in other.checks {
            self.push(&c.id, &c.anchor, c.status, c.measured, c.detail);
        }
        for f in other.flags {
            self.flag(f);
        }
        for (k, v) in other.data {
            self.data.insert(format!("{}.{k}", other.command), v);
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.command).unwrap();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Flagged => "FLAG",
            };
            writeln!(out, "  [{tag}] {}: {}", c.id, compact(&c.measured)).unwrap();
            writeln!(out, "         {}", c.anchor).unwrap();
            if let Some(d) = &c.detail {
                writeln!(out, "         {d}").unwrap();
            }
        }
        if !self.flags.is_empty() {
            writeln!(out, "conventions").unwrap();
            for f in &self.flags {
                writeln!(out, "  {} ({})", f.id, f.anchor).unwrap();
                writeln!(out, "    stated:   {}", f.stated).unwrap();
                writeln!(out, "    resolved: {}", f.resolved).unwrap();
                writeln!(out, "    evidence: {}", f.evidence).unwrap();
            }
        }
        writeln!(
            out,
            "summary: {} passed, {} failed, {} flagged",
            self.summary.passed, self.summary.failed, self.summary.flagged
        )
        .unwrap();
        out
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 160 {
        format!(
            "{}...",
            &s[..s
                .char_indices()
                .take_while(|(i, _)| *i < 157)
                .last()
                .map_or(0, |(i, c)| i + c.len_utf8())]
        )
    } else {
        s
    }
}
