//! Corpora for many (project, version) pairs.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use log::{info, warn};

use super::{Corpus, ScanOptions};
use crate::{Error, Result};

/// File name of a saved index inside `<dir>/<project>/<version>/`.
pub const INDEX_FILE_NAME: &str = "corpus.idx.json";

#[derive(Debug, Clone, Default)]
pub struct CorpusSet {
    corpora: BTreeMap<(String, String), Arc<Corpus>>,
}

impl CorpusSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, corpus: Corpus) {
        self.corpora
            .insert((corpus.project.clone(), corpus.version.clone()), Arc::new(corpus));
    }

    pub fn get(&self, project: &str, version: &str) -> Option<&Arc<Corpus>> {
        self.corpora.get(&(project.to_string(), version.to_string()))
    }

    pub fn len(&self) -> usize {
        self.corpora.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpora.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = (&str, &str)> {
        self.corpora.keys().map(|(p, v)| (p.as_str(), v.as_str()))
    }

    /// Load every `<dir>/<project>/<version>/`: the saved index when present,
    /// otherwise the directory is ingested as a source tree.
    pub fn load_dir(dir: &Path, options: &ScanOptions) -> Result<Self> {
        let mut set = CorpusSet::new();
        for project in sorted_subdirs(dir)? {
            for version in sorted_subdirs(&project)? {
                let p = name_of(&project);
                let v = name_of(&version);
                let idx = version.join(INDEX_FILE_NAME);
                let corpus = if idx.is_file() {
                    let c = Corpus::load(&idx)?;
                    if c.project != p || c.version != v {
                        warn!(
                            "{}: index is for {}/{}, directory says {p}/{v}",
                            idx.display(),
                            c.project,
                            c.version
                        );
                    }
                    c
                } else {
                    match Corpus::ingest(&version, &p, &v, options) {
                        Ok((c, report)) => {
                            for s in &report.skipped {
                                warn!("skipped {}: {}", s.path.display(), s.reason);
                            }
                            c
                        }
                        Err(Error::EmptyCorpus) => {
                            warn!("{}: no source files", version.display());
                            continue;
                        }
                        Err(e) => return Err(e),
                    }
                };
                info!(
                    "loaded corpus {}/{} ({} files)",
                    corpus.project,
                    corpus.version,
                    corpus.len()
                );
                set.insert(corpus);
            }
        }
        Ok(set)
    }
}

fn name_of(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.path().is_dir() {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_index_and_source_trees() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("proj/1.0/src");
        std::fs::create_dir_all(&src).unwrap();
        std::fs::write(src.join("A.java"), "class A {}").unwrap();
        let saved = Corpus::from_sources("other", "2.0", &[("B.java", "class B {}")]).unwrap();
        std::fs::create_dir_all(tmp.path().join("other/2.0")).unwrap();
        saved.save(&tmp.path().join("other/2.0").join(INDEX_FILE_NAME)).unwrap();
        std::fs::create_dir_all(tmp.path().join("empty/0")).unwrap();

        let set = CorpusSet::load_dir(tmp.path(), &ScanOptions::default()).unwrap();
        assert_eq!(set.keys().collect::<Vec<_>>(), vec![("other", "2.0"), ("proj", "1.0")]);
        assert_eq!(set.get("proj", "1.0").unwrap().files[0].path, "src/A.java");
        assert!(set.get("nope", "1").is_none());
    }
}
