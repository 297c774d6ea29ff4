//! File-level reference graph standing in for a static call graph.
//!
//! File A calls file B when A's text mentions, as a whole identifier, a class
//! declared in B. There is no type or import resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;

use super::{FileId, SourceFileRecord};
use crate::exec::{map_slice, Execution};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallGraph {
    nodes: BTreeSet<FileId>,
    edges: BTreeSet<(FileId, FileId)>,
    callers: BTreeMap<FileId, Vec<FileId>>,
    callees: BTreeMap<FileId, Vec<FileId>>,
}

impl CallGraph {
    /// Build from an explicit edge list. Self-loops and edges touching
    /// unknown nodes are dropped.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = FileId>,
        edges: impl IntoIterator<Item = (FileId, FileId)>,
    ) -> Self {
        let nodes: BTreeSet<FileId> = nodes.into_iter().collect();
        let edges: BTreeSet<(FileId, FileId)> = edges
            .into_iter()
            .filter(|(a, b)| a != b && nodes.contains(a) && nodes.contains(b))
            .collect();
        let mut callers: BTreeMap<FileId, Vec<FileId>> = BTreeMap::new();
        let mut callees: BTreeMap<FileId, Vec<FileId>> = BTreeMap::new();
        for &(a, b) in &edges {
            callees.entry(a).or_default().push(b);
            callers.entry(b).or_default().push(a);
        }
        CallGraph {
            nodes,
            edges,
            callers,
            callees,
        }
    }

    pub fn nodes(&self) -> &BTreeSet<FileId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(FileId, FileId)> {
        &self.edges
    }

    /// Files with an edge into `file`.
    pub fn callers(&self, file: FileId) -> &[FileId] {
        self.callers.get(&file).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Files `file` has an edge to.
    pub fn callees(&self, file: FileId) -> &[FileId] {
        self.callees.get(&file).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn identifier_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z_][A-Za-z0-9_]*").unwrap())
}

/// Build the reference graph over one (project, version) corpus.
pub fn build_call_graph(records: &[SourceFileRecord]) -> CallGraph {
    build_call_graph_with(records, Execution::default())
}

pub fn build_call_graph_with(records: &[SourceFileRecord], exec: Execution) -> CallGraph {
    let mut declared: BTreeMap<&str, Vec<FileId>> = BTreeMap::new();
    for r in records {
        for c in &r.class_names {
            declared.entry(c.as_str()).or_default().push(r.file_id);
        }
    }
    let per_file = map_slice(exec, records, |r| {
        let mentioned: BTreeSet<&str> = identifier_re()
            .find_iter(&r.raw_text)
            .map(|m| m.as_str())
            .filter(|w| declared.contains_key(w))
            .collect();
        let mut out = Vec::new();
        for name in mentioned {
            for &target in &declared[name] {
                if target != r.file_id {
                    out.push((r.file_id, target));
                }
            }
        }
        out
    });
    CallGraph::from_edges(records.iter().map(|r| r.file_id), per_file.into_iter().flatten())
}
