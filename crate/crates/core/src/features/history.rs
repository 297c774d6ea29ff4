//! Fix history: which earlier reports fixed which files.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};

use crate::corpus::{token_counts, TokenCounts};
use crate::report::BugReport;

#[derive(Debug, Clone, PartialEq)]
pub struct FixEntry {
    pub report_id: String,
    pub created_at: DateTime<Utc>,
    pub month: i64,
    pub tokens: TokenCounts,
}

/// Per (project, path): fixing reports in (created_at, report_id) order.
#[derive(Debug, Clone, Default)]
pub struct HistoryIndex {
    by_file: BTreeMap<(String, String), Vec<FixEntry>>,
}

impl HistoryIndex {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a BugReport>) -> Self {
        let mut by_file: BTreeMap<(String, String), Vec<FixEntry>> = BTreeMap::new();
        for r in reports {
            let tokens = token_counts(&r.text());
            for path in &r.fixed_files {
                by_file
                    .entry((r.project.clone(), path.clone()))
                    .or_default()
                    .push(FixEntry {
                        report_id: r.report_id.clone(),
                        created_at: r.created_at,
                        month: r.month(),
                        tokens: tokens.clone(),
                    });
            }
        }
        for entries in by_file.values_mut() {
            entries.sort_by(|a, b| (a.created_at, &a.report_id).cmp(&(b.created_at, &b.report_id)));
        }
        HistoryIndex { by_file }
    }

    /// Fixes of `path` recorded strictly before `report` was created.
    pub fn prior_fixes(&self, project: &str, path: &str, report: &BugReport) -> FixHistory<'_> {
        let entries = self
            .by_file
            .get(&(project.to_string(), path.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let end = entries.partition_point(|e| e.created_at < report.created_at);
        FixHistory {
            entries: &entries[..end],
        }
    }
}

/// Chronologically ordered prior fixes of one file for one report.
#[derive(Debug, Clone, Copy)]
pub struct FixHistory<'a> {
    entries: &'a [FixEntry],
}

impl<'a> FixHistory<'a> {
    pub fn new(entries: &'a [FixEntry]) -> Self {
        FixHistory { entries }
    }

    pub fn entries(&self) -> &'a [FixEntry] {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&'a FixEntry> {
        self.entries.last()
    }

    /// Token counts of all entries concatenated.
    pub fn combined_tokens(&self) -> TokenCounts {
        let mut out = TokenCounts::new();
        for e in self.entries {
            for (t, n) in &e.tokens {
                *out.entry(t.clone()).or_insert(0) += n;
            }
        }
        out
    }
}
