//! `corpus.idx.json`: the serialized form of an ingested corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::graph::build_call_graph_with;
use super::{
    build_index, scan_source_tree, CallGraph, CorpusIndex, FileId, IngestReport, MethodApi, ScanOptions,
    SourceFileRecord, TokenCounts,
};
use crate::{Error, Result};

pub const INDEX_FORMAT_VERSION: u32 = 1;

/// An ingested (project, version): records, reference graph and tf-idf index.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub project: String,
    pub version: String,
    pub files: Vec<SourceFileRecord>,
    pub graph: CallGraph,
    pub index: CorpusIndex,
    by_path: BTreeMap<String, FileId>,
}

/// Per-file entry of the index document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusFile {
    pub file_id: FileId,
    pub path: String,
    pub class_names: BTreeSet<String>,
    pub method_names: BTreeSet<String>,
    pub api_text: String,
    pub method_apis: Vec<MethodApi>,
    pub tokens: TokenCounts,
    pub raw_text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexDocument {
    format_version: u32,
    project: String,
    version: String,
    files: Vec<CorpusFile>,
    edges: Vec<(FileId, FileId)>,
    vocabulary: BTreeMap<String, u32>,
    idf: BTreeMap<String, f64>,
}

impl Corpus {
    /// Build from records already carrying dense, path-ordered file ids.
    pub fn from_records(
        project: impl Into<String>,
        version: impl Into<String>,
        files: Vec<SourceFileRecord>,
    ) -> Result<Self> {
        let index = build_index(&files)?;
        let graph = build_call_graph_with(&files, Default::default());
        Ok(Self::assemble(project.into(), version.into(), files, graph, index))
    }

    /// Build from in-memory `(path, text)` pairs; ids follow path order.
    pub fn from_sources<P: AsRef<str>, T: AsRef<str>>(
        project: &str,
        version: &str,
        sources: &[(P, T)],
    ) -> Result<Self> {
        let mut sorted: Vec<(&str, &str)> = sources.iter().map(|(p, t)| (p.as_ref(), t.as_ref())).collect();
        sorted.sort();
        let files = sorted
            .into_iter()
            .enumerate()
            .map(|(i, (p, t))| SourceFileRecord::from_source(FileId(i as u32), p, project, version, t))
            .collect();
        Self::from_records(project, version, files)
    }

    /// Scan a source tree and build everything.
    pub fn ingest(root: &Path, project: &str, version: &str, options: &ScanOptions) -> Result<(Self, IngestReport)> {
        let (files, report) = scan_source_tree(root, project, version, options)?;
        let index = build_index(&files)?;
        let graph = build_call_graph_with(&files, options.execution);
        Ok((
            Self::assemble(project.into(), version.into(), files, graph, index),
            report,
        ))
    }

    fn assemble(
        project: String,
        version: String,
        files: Vec<SourceFileRecord>,
        graph: CallGraph,
        index: CorpusIndex,
    ) -> Self {
        let by_path = files.iter().map(|f| (f.path.clone(), f.file_id)).collect();
        Corpus {
            project,
            version,
            files,
            graph,
            index,
            by_path,
        }
    }

    pub fn file(&self, id: FileId) -> &SourceFileRecord {
        &self.files[id.index()]
    }

    pub fn file_by_path(&self, path: &str) -> Option<FileId> {
        self.by_path.get(path).copied()
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn to_json(&self) -> String {
        let vocabulary = self.index.vocabulary().clone();
        let idf_values = self.index.idf_values();
        let idf = vocabulary
            .iter()
            .map(|(t, &id)| (t.clone(), idf_values[id as usize]))
            .collect();
        let doc = IndexDocument {
            format_version: INDEX_FORMAT_VERSION,
            project: self.project.clone(),
            version: self.version.clone(),
            files: self
                .files
                .iter()
                .map(|f| CorpusFile {
                    file_id: f.file_id,
                    path: f.path.clone(),
                    class_names: f.class_names.clone(),
                    method_names: f.method_names.clone(),
                    api_text: f.api_text.clone(),
                    method_apis: f.method_apis.clone(),
                    tokens: f.tokens.clone(),
                    raw_text: f.raw_text.clone(),
                })
                .collect(),
            edges: self.graph.edges().iter().copied().collect(),
            vocabulary,
            idf,
        };
        serde_json::to_string_pretty(&doc).expect("index document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: IndexDocument = serde_json::from_str(text).map_err(|e| Error::json("corpus index", e))?;
        if doc.format_version != INDEX_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                what: "corpus index",
                found: doc.format_version,
                expected: INDEX_FORMAT_VERSION,
            });
        }
        let mut files: Vec<SourceFileRecord> = doc
            .files
            .into_iter()
            .map(|f| SourceFileRecord {
                file_id: f.file_id,
                path: f.path,
                project: doc.project.clone(),
                version: doc.version.clone(),
                raw_text: f.raw_text,
                class_names: f.class_names,
                method_names: f.method_names,
                api_text: f.api_text,
                method_apis: f.method_apis,
                tokens: f.tokens,
            })
            .collect();
        files.sort_by_key(|f| f.file_id);
        if files.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if files.iter().enumerate().any(|(i, f)| f.file_id.index() != i) {
            return Err(Error::Config("corpus index file ids are not dense".into()));
        }
        let mut idf = vec![0.0; doc.vocabulary.len()];
        for (token, &id) in &doc.vocabulary {
            let slot = idf
                .get_mut(id as usize)
                .ok_or_else(|| Error::Config(format!("vocabulary id {id} out of range")))?;
            *slot = *doc
                .idf
                .get(token)
                .ok_or_else(|| Error::Config(format!("missing idf for token {token:?}")))?;
        }
        let index = CorpusIndex::assemble(&files, doc.vocabulary, idf);
        let graph = CallGraph::from_edges(files.iter().map(|f| f.file_id), doc.edges);
        Ok(Self::assemble(doc.project, doc.version, files, graph, index))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
