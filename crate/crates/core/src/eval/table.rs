//! Plain-text and JSON result tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CategoryMetrics, EvalResult};
use crate::query::ShotMode;
use crate::report::Category;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TextTable {
    /// Left-aligned first columns, right-aligned numbers, two-space gutters.
    pub fn render(&self) -> String {
        let ncol = self.columns.len();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let numeric: Vec<bool> = (0..ncol)
            .map(|i| !self.rows.is_empty() && self.rows.iter().all(|r| r.get(i).is_some_and(|c| looks_numeric(c))))
            .collect();
        let line = |cells: &[String]| -> String {
            let mut s = String::new();
            for (i, cell) in cells.iter().enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                if numeric[i] {
                    let _ = write!(s, "{cell:>w$}", w = widths[i]);
                } else {
                    let _ = write!(s, "{cell:<w$}", w = widths[i]);
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        out.push_str(&line(&self.columns));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

fn looks_numeric(s: &str) -> bool {
    s == "-" || s.trim_end_matches('%').parse::<f64>().is_ok()
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

fn num(x: f64) -> String {
    format!("{x:.4}")
}

fn summary_cells(m: Option<&CategoryMetrics>) -> Vec<String> {
    match m {
        Some(m) => vec![pct(m.top1), pct(m.top5), pct(m.top10), num(m.mrr), num(m.map)],
        None => vec!["-".into(); 5],
    }
}

const GROUPS: [&str; 4] = ["PE", "ST", "NL", "ALL"];

fn group<'a>(r: &'a EvalResult, name: &str) -> Option<&'a CategoryMetrics> {
    match name {
        "ALL" => r.all.as_ref(),
        c => c.parse::<Category>().ok().and_then(|c| r.per_category.get(&c)),
    }
}

/// Category / technique rows with Top1, Top5, Top10, MRR and MAP.
pub fn summary_table(runs: &[(&str, &EvalResult)]) -> TextTable {
    let mut rows = Vec::new();
    for g in GROUPS {
        for (tech, r) in runs {
            let mut row = vec![g.to_string(), tech.to_string()];
            row.extend(summary_cells(group(r, g)));
            rows.push(row);
        }
    }
    TextTable {
        title: "Comparison of techniques".into(),
        columns: ["", "Tech", "Top1", "Top5", "Top10", "MRR", "MAP"]
            .map(String::from)
            .to_vec(),
        rows,
    }
}

/// Feature-subset rows with MRR and MAP per category.
pub fn ablation_table(rows_in: &[(String, EvalResult)]) -> TextTable {
    let mut columns = vec!["Features".to_string()];
    for c in Category::ALL {
        columns.push(format!("{c} MRR"));
        columns.push(format!("{c} MAP"));
    }
    let rows = rows_in
        .iter()
        .map(|(name, r)| {
            let mut row = vec![name.clone()];
            for c in Category::ALL {
                match r.per_category.get(&c) {
                    Some(m) => {
                        row.push(num(m.mrr));
                        row.push(num(m.map));
                    }
                    None => row.extend(["-".to_string(), "-".to_string()]),
                }
            }
            row
        })
        .collect();
    TextTable {
        title: "Comparison of feature subsets".into(),
        columns,
        rows,
    }
}

/// Category / shot-mode rows with Top1, Top5, Top10, MRR and MAP.
pub fn shots_table(runs: &[(ShotMode, EvalResult)]) -> TextTable {
    let mut rows = Vec::new();
    for g in GROUPS {
        for (mode, r) in runs {
            let label = match mode {
                ShotMode::ZeroShot => "0-shot",
                ShotMode::OneShot => "1-shot",
            };
            let mut row = vec![g.to_string(), label.to_string()];
            row.extend(summary_cells(group(r, g)));
            rows.push(row);
        }
    }
    TextTable {
        title: "Comparison of prompt shots".into(),
        columns: ["", "shots", "Top1", "Top5", "Top10", "MRR", "MAP"]
            .map(String::from)
            .to_vec(),
        rows,
    }
}
