//! Evaluation: metrics, chronological runs, ablations and result tables.

mod metrics;
mod run;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use metrics::{average_precision, first_relevant_rank, hit_at_k, map, mrr, reciprocal_rank, top_k};
pub use run::{
    ablation, default_ablation_rows, evaluate, prepare, reformulation_experiment, run_eval, train_model, CycleRow,
    FeatureSelection, ModelSource, Prepared, PreparedReport,
};
pub use table::{ablation_table, shots_table, summary_table, TextTable};

use crate::report::Category;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub top1: f64,
    pub top5: f64,
    pub top10: f64,
    pub mrr: f64,
    pub map: f64,
    pub n: usize,
}

/// Per-report outcome kept for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOutcome {
    pub report_id: String,
    pub category: Category,
    pub query: Vec<String>,
    pub fallback_query: bool,
    pub first_relevant_rank: Option<usize>,
    pub reciprocal_rank: f64,
    pub average_precision: f64,
    pub top10: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Categories with at least one evaluated report.
    pub per_category: BTreeMap<Category, CategoryMetrics>,
    pub all: Option<CategoryMetrics>,
    /// Reports dropped before evaluation (no corpus).
    pub excluded: Vec<String>,
    pub reports: Vec<ReportOutcome>,
}

impl EvalResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}
