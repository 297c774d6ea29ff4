//! Bug reports, their ground truth, and PE/ST/NL classification.

mod classify;
mod trace;

use std::collections::BTreeSet;
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

pub use classify::{classify, classify_text, detect_program_entities};
pub use trace::{detect_exception_headers, detect_stack_traces, StackFrame};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub report_id: String,
    pub project: String,
    pub version: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(with = "timestamp")]
    pub created_at: DateTime<Utc>,
    /// Corpus-relative paths of the files fixed for this report. Empty in live use.
    #[serde(default)]
    pub fixed_files: BTreeSet<String>,
}

impl BugReport {
    /// Title and description joined, the text every detector looks at.
    pub fn text(&self) -> String {
        format!("{}\n{}", self.title, self.description)
    }

    /// Month counter of `created_at`.
    pub fn month(&self) -> i64 {
        month_of(&self.created_at)
    }

    pub fn has_ground_truth(&self) -> bool {
        !self.fixed_files.is_empty()
    }

    /// Checks the dataset-level invariants: non-empty id and ground truth.
    pub fn validate_for_dataset(&self) -> Result<()> {
        if self.report_id.trim().is_empty() {
            return Err(Error::InvalidReport {
                id: self.report_id.clone(),
                reason: "empty report_id".into(),
            });
        }
        if self.fixed_files.is_empty() {
            return Err(Error::InvalidReport {
                id: self.report_id.clone(),
                reason: "fixed_files is empty".into(),
            });
        }
        if let Some(bad) = self.fixed_files.iter().find(|p| p.starts_with('/') || p.contains('\\')) {
            return Err(Error::InvalidReport {
                id: self.report_id.clone(),
                reason: format!("fixed file {bad:?} is not a corpus-relative path"),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Mentions programming entities.
    PE,
    /// Contains at least one stack trace frame.
    ST,
    /// Plain natural language.
    NL,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::PE, Category::ST, Category::NL];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::PE => "PE",
            Category::ST => "ST",
            Category::NL => "NL",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PE" => Ok(Category::PE),
            "ST" => Ok(Category::ST),
            "NL" => Ok(Category::NL),
            other => Err(Error::Config(format!("unknown category {other:?}"))),
        }
    }
}

/// Parse an ISO-8601 timestamp. Offsets are converted to UTC; naive
/// date-times and bare dates are taken as UTC.
pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t.and_utc());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc());
    }
    Err(Error::InvalidTimestamp(s.to_string()))
}

/// `year * 12 + (month - 1)` for an ISO-8601 timestamp string.
pub fn month_index(timestamp: &str) -> Result<i64> {
    parse_timestamp(timestamp).map(|t| month_of(&t))
}

pub fn month_of(t: &DateTime<Utc>) -> i64 {
    t.year() as i64 * 12 + (t.month0() as i64)
}

mod timestamp {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_timestamp(&s).map_err(serde::de::Error::custom)
    }
}

/// Read a JSON Lines dataset. Blank lines are skipped; every report must carry ground truth.
pub fn load_reports(path: &Path) -> Result<Vec<BugReport>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_reports(std::io::BufReader::new(file), &path.display().to_string())
}

pub fn parse_reports(reader: impl BufRead, source: &str) -> Result<Vec<BugReport>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let report: BugReport =
            serde_json::from_str(&line).map_err(|e| Error::json(format!("{source} line {}", n + 1), e))?;
        report.validate_for_dataset()?;
        if !seen.insert(report.report_id.clone()) {
            return Err(Error::InvalidReport {
                id: report.report_id,
                reason: "duplicate report_id".into(),
            });
        }
        out.push(report);
    }
    Ok(out)
}
