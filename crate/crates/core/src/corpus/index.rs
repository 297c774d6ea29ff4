//! tf-idf index over one corpus.

use std::collections::{BTreeMap, BTreeSet};

use super::{token_counts, FileId, SourceFileRecord, TokenCounts};
use crate::{Error, Result};

/// Sparse vector sorted by term id, with its Euclidean norm cached.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVec {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl SparseVec {
    /// Entries must be sorted by term id with no duplicates.
    pub fn from_sorted(entries: Vec<(u32, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        SparseVec { entries, norm }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Cosine similarity; 0 when either side is the zero vector.
pub fn cosine(a: &SparseVec, b: &SparseVec) -> f64 {
    if a.is_zero() || b.is_zero() {
        return 0.0;
    }
    (a.dot(b) / (a.norm * b.norm)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct CorpusIndex {
    vocabulary: BTreeMap<String, u32>,
    idf: Vec<f64>,
    file_vectors: Vec<SparseVec>,
    class_lookup: BTreeMap<String, BTreeSet<FileId>>,
    method_names: BTreeSet<String>,
    /// Per file: the file-level API vector followed by one vector per method.
    api_vectors: Vec<Vec<SparseVec>>,
}

/// Build the tf-idf index. idf(t) = ln(N / df(t)); weights are raw tf times idf.
pub fn build_index(records: &[SourceFileRecord]) -> Result<CorpusIndex> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for r in records {
        for token in r.tokens.keys() {
            *df.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let n = records.len() as f64;
    let vocabulary: BTreeMap<String, u32> = df.keys().enumerate().map(|(i, t)| (t.to_string(), i as u32)).collect();
    let idf: Vec<f64> = df.values().map(|&d| (n / d as f64).ln()).collect();
    Ok(CorpusIndex::assemble(records, vocabulary, idf))
}

impl CorpusIndex {
    pub(crate) fn assemble(records: &[SourceFileRecord], vocabulary: BTreeMap<String, u32>, idf: Vec<f64>) -> Self {
        let mut index = CorpusIndex {
            vocabulary,
            idf,
            file_vectors: Vec::new(),
            class_lookup: BTreeMap::new(),
            method_names: BTreeSet::new(),
            api_vectors: Vec::new(),
        };
        for r in records {
            for c in &r.class_names {
                index.class_lookup.entry(c.clone()).or_default().insert(r.file_id);
            }
            index.method_names.extend(r.method_names.iter().cloned());
        }
        index.file_vectors = records.iter().map(|r| index.vectorize(&r.tokens)).collect();
        index.api_vectors = records
            .iter()
            .map(|r| {
                std::iter::once(r.api_text.as_str())
                    .chain(r.method_apis.iter().map(|m| m.text.as_str()))
                    .map(|t| index.vectorize_text(t))
                    .collect()
            })
            .collect();
        index
    }

    pub fn vocabulary(&self) -> &BTreeMap<String, u32> {
        &self.vocabulary
    }

    pub fn file_count(&self) -> usize {
        self.file_vectors.len()
    }

    pub fn idf_of(&self, token: &str) -> Option<f64> {
        self.vocabulary.get(token).map(|&id| self.idf[id as usize])
    }

    pub(crate) fn idf_values(&self) -> &[f64] {
        &self.idf
    }

    pub fn contains_token(&self, token: &str) -> bool {
        self.vocabulary.contains_key(token)
    }

    pub fn file_vector(&self, file: FileId) -> &SparseVec {
        &self.file_vectors[file.index()]
    }

    /// File-level API vector first, then one per declared method.
    pub fn api_vectors(&self, file: FileId) -> &[SparseVec] {
        &self.api_vectors[file.index()]
    }

    pub fn class_lookup(&self) -> &BTreeMap<String, BTreeSet<FileId>> {
        &self.class_lookup
    }

    pub fn files_declaring(&self, class_name: &str) -> Option<&BTreeSet<FileId>> {
        self.class_lookup.get(class_name)
    }

    pub fn is_declared_class(&self, name: &str) -> bool {
        self.class_lookup.contains_key(name)
    }

    pub fn is_declared_method(&self, name: &str) -> bool {
        self.method_names.contains(name)
    }

    /// tf-idf vector for a token multiset; out-of-vocabulary tokens are dropped.
    pub fn vectorize(&self, counts: &TokenCounts) -> SparseVec {
        let mut entries: Vec<(u32, f64)> = counts
            .iter()
            .filter_map(|(t, &tf)| {
                let id = *self.vocabulary.get(t)?;
                let w = tf as f64 * self.idf[id as usize];
                (w != 0.0).then_some((id, w))
            })
            .collect();
        entries.sort_by_key(|e| e.0);
        SparseVec::from_sorted(entries)
    }

    pub fn vectorize_text(&self, text: &str) -> SparseVec {
        self.vectorize(&token_counts(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u32, text: &str) -> SourceFileRecord {
        SourceFileRecord::from_source(FileId(id), format!("F{id}.java"), "p", "1", text)
    }

    #[test]
    fn empty_corpus_is_error() {
        assert!(matches!(build_index(&[]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn single_file_has_zero_idf() {
        let idx = build_index(&[rec(0, "stream buffer stream")]).unwrap();
        assert_eq!(idx.idf_of("stream"), Some(0.0));
        assert!(idx.file_vector(FileId(0)).is_zero());
    }

    #[test]
    fn idf_of_half_present_token() {
        let idx = build_index(&[rec(0, "stream buffer"), rec(1, "buffer")]).unwrap();
        assert_eq!(idx.idf_of("stream"), Some(2f64.ln()));
        assert_eq!(idx.idf_of("buffer"), Some(0.0));
        let v = idx.file_vector(FileId(0));
        assert_eq!(v.entries().len(), 1);
        assert_eq!(v.entries()[0].1, 2f64.ln());
    }

    #[test]
    fn cosine_edges() {
        let a = SparseVec::from_sorted(vec![(0, 1.0), (2, 3.0)]);
        let b = SparseVec::from_sorted(vec![(1, 2.0)]);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&a, &b), 0.0);
        assert_eq!(cosine(&a, &SparseVec::default()), 0.0);
    }

    #[test]
    fn class_lookup_inverts_class_names() {
        let records = vec![rec(0, "class A {} class B {}"), rec(1, "class B {}")];
        let idx = build_index(&records).unwrap();
        for r in &records {
            for c in &r.class_names {
                assert!(idx.files_declaring(c).unwrap().contains(&r.file_id));
            }
        }
        for (c, files) in idx.class_lookup() {
            for f in files {
                assert!(records[f.index()].class_names.contains(c));
            }
        }
    }
}
