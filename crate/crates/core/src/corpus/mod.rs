//! Source corpus ingest: scanning, entity extraction, tf-idf index and call graph.

mod entities;
mod graph;
mod index;
mod scan;
mod set;
pub mod stopwords;
mod store;
mod tokenize;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use entities::{extract_entities, Entities, MethodApi};
pub use graph::{build_call_graph, CallGraph};
pub use index::{build_index, cosine, CorpusIndex, SparseVec};
pub use scan::{scan_source_tree, IngestReport, ScanOptions, SkippedFile};
pub use set::{CorpusSet, INDEX_FILE_NAME};
pub use store::{Corpus, CorpusFile, INDEX_FORMAT_VERSION};
pub use tokenize::{split_compound, token_counts, tokenize, TokenCounts};

/// Dense per-corpus file identifier: the file's position in path order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FileId(pub u32);

impl FileId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One ingested source file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceFileRecord {
    pub file_id: FileId,
    /// Corpus-relative path with `/` separators.
    pub path: String,
    pub project: String,
    pub version: String,
    pub raw_text: String,
    pub class_names: BTreeSet<String>,
    pub method_names: BTreeSet<String>,
    pub api_text: String,
    pub method_apis: Vec<MethodApi>,
    pub tokens: TokenCounts,
}

impl SourceFileRecord {
    /// Build a record from in-memory source text.
    pub fn from_source(
        file_id: FileId,
        path: impl Into<String>,
        project: impl Into<String>,
        version: impl Into<String>,
        raw_text: impl Into<String>,
    ) -> Self {
        let raw_text = raw_text.into();
        let entities = extract_entities(&raw_text);
        let tokens = token_counts(&raw_text);
        SourceFileRecord {
            file_id,
            path: path.into(),
            project: project.into(),
            version: version.into(),
            raw_text,
            class_names: entities.class_names,
            method_names: entities.method_names,
            api_text: entities.api_text,
            method_apis: entities.method_apis,
            tokens,
        }
    }
}

/// Whether `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
