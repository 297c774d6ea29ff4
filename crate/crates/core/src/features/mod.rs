//! The seven per-(report, file) ranking features.

mod history;
mod table;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use history::{FixEntry, FixHistory, HistoryIndex};
pub use table::{read_feature_table, write_feature_table, FeatureRow};

use crate::corpus::{cosine, token_counts, CallGraph, Corpus, CorpusIndex, FileId, SourceFileRecord, SparseVec};
use crate::exec::{map_range, Execution};
use crate::report::BugReport;
use crate::{Error, Result};

pub const FEATURE_COUNT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::F1,
        Feature::F2,
        Feature::F3,
        Feature::F4,
        Feature::F5,
        Feature::F6,
        Feature::F7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["f1", "f2", "f3", "f4", "f5", "f6", "f7"][self.index()]
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    /// Accepts `f1`..`f7` and the short names TS, CL, CG, API, CF, BFR, BFF.
    fn from_str(s: &str) -> Result<Self> {
        let f = match s.trim().to_ascii_uppercase().as_str() {
            "F1" | "CL" => Feature::F1,
            "F2" | "CG" => Feature::F2,
            "F3" | "TS" => Feature::F3,
            "F4" | "API" => Feature::F4,
            "F5" | "CF" => Feature::F5,
            "F6" | "BFR" => Feature::F6,
            "F7" | "BFF" => Feature::F7,
            other => return Err(Error::Config(format!("unknown feature {other:?}"))),
        };
        Ok(f)
    }
}

/// Parse a comma-separated feature subset such as `TS,CL,CG` or `ALL`.
/// Order is preserved and duplicates are dropped.
pub fn parse_feature_subset(s: &str) -> Result<Vec<Feature>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Feature::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let f: Feature = part.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty feature subset".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub f1_class_match: f64,
    pub f2_call_graph: f64,
    pub f3_text_sim: f64,
    pub f4_api_sim: f64,
    pub f5_collab: f64,
    pub f6_recency: f64,
    pub f7_frequency: f64,
}

impl FeatureVector {
    pub fn from_array(v: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            f1_class_match: v[0],
            f2_call_graph: v[1],
            f3_text_sim: v[2],
            f4_api_sim: v[3],
            f5_collab: v[4],
            f6_recency: v[5],
            f7_frequency: v[6],
        }
    }

    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.f1_class_match,
            self.f2_call_graph,
            self.f3_text_sim,
            self.f4_api_sim,
            self.f5_collab,
            self.f6_recency,
            self.f7_frequency,
        ]
    }

    pub fn get(&self, f: Feature) -> f64 {
        self.to_array()[f.index()]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// f1: summed length of the distinct declared classes of `file` named in the query.
pub fn class_name_match_score(file: &SourceFileRecord, entities: &[String]) -> f64 {
    let distinct: BTreeSet<&str> = entities.iter().map(String::as_str).collect();
    distinct
        .into_iter()
        .filter(|e| file.class_names.contains(*e))
        .map(|e| e.chars().count() as f64)
        .sum()
}

/// f1 for every file of the corpus, indexed by file id.
pub fn class_name_match_scores(index: &CorpusIndex, file_count: usize, entities: &[String]) -> Vec<f64> {
    let mut out = vec![0.0; file_count];
    let distinct: BTreeSet<&str> = entities.iter().map(String::as_str).collect();
    for e in distinct {
        if let Some(files) = index.files_declaring(e) {
            for f in files {
                out[f.index()] += e.chars().count() as f64;
            }
        }
    }
    out
}

/// f2: sum of the neighbours' f1 over callers and callees. The file's own f1 is not included.
pub fn call_graph_score(file: FileId, graph: &CallGraph, f1_of: &[f64]) -> f64 {
    let callers: f64 = graph.callers(file).iter().map(|f| f1_of[f.index()]).sum();
    let callees: f64 = graph.callees(file).iter().map(|f| f1_of[f.index()]).sum();
    callers + callees
}

/// f3: cosine between the report and file tf-idf vectors.
pub fn text_similarity(report_vec: &SparseVec, file_vec: &SparseVec) -> f64 {
    cosine(report_vec, file_vec)
}

/// f4: best cosine over the file-level API vector and each method's vector.
pub fn api_similarity(report_vec: &SparseVec, api_vectors: &[SparseVec]) -> f64 {
    api_vectors.iter().map(|v| cosine(report_vec, v)).fold(0.0, f64::max)
}

/// f5: cosine against the concatenated text of the prior fixing reports.
pub fn collaborative_filtering_score(report_vec: &SparseVec, history: &FixHistory<'_>, index: &CorpusIndex) -> f64 {
    if history.is_empty() {
        return 0.0;
    }
    cosine(report_vec, &index.vectorize(&history.combined_tokens()))
}

/// f6: 1/(months since the last prior fix + 1); 0 without history.
pub fn bug_fix_recency(report_month: i64, history: &FixHistory<'_>) -> f64 {
    match history.last() {
        None => 0.0,
        Some(last) => {
            let delta = (report_month - last.month).max(0);
            1.0 / (delta as f64 + 1.0)
        }
    }
}

/// f7: number of prior fixing reports.
pub fn bug_fix_frequency(history: &FixHistory<'_>) -> f64 {
    history.len() as f64
}

/// tf-idf vector of the report's title and description.
pub fn report_vector(report: &BugReport, index: &CorpusIndex) -> SparseVec {
    index.vectorize(&token_counts(&report.text()))
}

/// All seven features for one (report, file) pair.
pub fn extract_features(
    report: &BugReport,
    entities: &[String],
    file: FileId,
    corpus: &Corpus,
    history: &HistoryIndex,
) -> FeatureVector {
    let f1_of = class_name_match_scores(&corpus.index, corpus.len(), entities);
    let report_vec = report_vector(report, &corpus.index);
    features_for(report, &report_vec, &f1_of, file, corpus, history)
}

fn features_for(
    report: &BugReport,
    report_vec: &SparseVec,
    f1_of: &[f64],
    file: FileId,
    corpus: &Corpus,
    history: &HistoryIndex,
) -> FeatureVector {
    let record = corpus.file(file);
    let fixes = history.prior_fixes(&report.project, &record.path, report);
    FeatureVector {
        f1_class_match: f1_of[file.index()],
        f2_call_graph: call_graph_score(file, &corpus.graph, f1_of),
        f3_text_sim: text_similarity(report_vec, corpus.index.file_vector(file)),
        f4_api_sim: api_similarity(report_vec, corpus.index.api_vectors(file)),
        f5_collab: collaborative_filtering_score(report_vec, &fixes, &corpus.index),
        f6_recency: bug_fix_recency(report.month(), &fixes),
        f7_frequency: bug_fix_frequency(&fixes),
    }
}

/// Features for every file of the corpus, indexed by file id.
pub fn extract_all(
    report: &BugReport,
    entities: &[String],
    corpus: &Corpus,
    history: &HistoryIndex,
    exec: Execution,
) -> Vec<FeatureVector> {
    let f1_of = class_name_match_scores(&corpus.index, corpus.len(), entities);
    let report_vec = report_vector(report, &corpus.index);
    map_range(exec, corpus.len(), |i| {
        features_for(report, &report_vec, &f1_of, FileId(i as u32), corpus, history)
    })
}
