#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;
use std::sync::Arc;

use faultline_core::corpus::{CorpusSet, ScanOptions};
use faultline_core::query::{MockProvider, QueryConfig, QueryEngine};
use faultline_core::report::{load_reports, BugReport};

/// The core crate's fixture directory, also when this module is included from another crate.
pub fn fixtures() -> PathBuf {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let own = here.join("fixtures");
    if own.join("mini").is_dir() {
        own
    } else {
        here.join("../core/fixtures")
    }
}

pub fn mini_reports() -> Vec<BugReport> {
    load_reports(&fixtures().join("mini/reports.jsonl")).unwrap()
}

pub fn mini_corpora() -> CorpusSet {
    CorpusSet::load_dir(&fixtures().join("mini/corpora"), &ScanOptions::default()).unwrap()
}

pub fn mini_mock() -> MockProvider {
    MockProvider::load(&fixtures().join("mini/mock.json")).unwrap()
}

pub fn mini_engine(config: QueryConfig) -> QueryEngine {
    QueryEngine::new(Arc::new(mini_mock()), config).unwrap()
}
