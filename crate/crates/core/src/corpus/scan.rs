use std::path::{Path, PathBuf};

use log::warn;
use walkdir::WalkDir;

use super::{FileId, SourceFileRecord};
use crate::exec::{map_range, map_slice, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Extensions without the leading dot.
    pub extensions: Vec<String>,
    pub execution: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            extensions: vec!["java".to_string()],
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

/// Files that could not be read during a scan.
#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub skipped: Vec<SkippedFile>,
}

/// Scan `root` for source files, one record per file in lexicographic path order.
pub fn scan_source_tree(
    root: &Path,
    project: &str,
    version: &str,
    options: &ScanOptions,
) -> Result<(Vec<SourceFileRecord>, IngestReport)> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let mut report = IngestReport::default();
    let mut candidates: Vec<(String, PathBuf)> = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
                warn!("skipping {}: {e}", path.display());
                report.skipped.push(SkippedFile {
                    path,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if !entry.file_type().is_file() || !has_extension(entry.path(), &options.extensions) {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let rel = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        candidates.push((rel, entry.path().to_path_buf()));
    }
    candidates.sort();

    let loaded = map_slice(options.execution, &candidates, |(rel, abs)| {
        std::fs::read(abs)
            .map(|bytes| (rel.clone(), String::from_utf8_lossy(&bytes).into_owned()))
            .map_err(|e| SkippedFile {
                path: abs.clone(),
                reason: e.to_string(),
            })
    });

    let mut texts = Vec::with_capacity(loaded.len());
    for item in loaded {
        match item {
            Ok(t) => texts.push(t),
            Err(skip) => {
                warn!("skipping {}: {}", skip.path.display(), skip.reason);
                report.skipped.push(skip);
            }
        }
    }

    let records = map_range(options.execution, texts.len(), |i| {
        let (rel, text) = &texts[i];
        SourceFileRecord::from_source(FileId(i as u32), rel.clone(), project, version, text.clone())
    });
    Ok((records, report))
}

fn has_extension(path: &Path, extensions: &[String]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| extensions.iter().any(|x| x.trim_start_matches('.') == e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_by_extension_and_sorts() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("b")).unwrap();
        std::fs::write(dir.path().join("b/Zed.java"), "class Zed {}").unwrap();
        std::fs::write(dir.path().join("A.java"), "class A {}").unwrap();
        std::fs::write(dir.path().join("b/C.java"), "class C {}").unwrap();
        std::fs::write(dir.path().join("README.md"), "class Nope").unwrap();
        let (records, report) = scan_source_tree(dir.path(), "p", "1", &ScanOptions::default()).unwrap();
        let paths: Vec<_> = records.iter().map(|r| r.path.as_str()).collect();
        assert_eq!(paths, vec!["A.java", "b/C.java", "b/Zed.java"]);
        assert_eq!(records[2].file_id, FileId(2));
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let (records, _) = scan_source_tree(dir.path(), "p", "1", &ScanOptions::default()).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn missing_root_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let err = scan_source_tree(&dir.path().join("nope"), "p", "1", &ScanOptions::default());
        assert!(matches!(err, Err(Error::Io { .. })));
    }

    #[test]
    fn records_declared_class() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("BZip2CompressorOutputStream.java"),
            "public class BZip2CompressorOutputStream extends CompressorOutputStream {}",
        )
        .unwrap();
        let (records, _) = scan_source_tree(dir.path(), "p", "1", &ScanOptions::default()).unwrap();
        assert!(records[0].class_names.contains("BZip2CompressorOutputStream"));
    }

    #[test]
    fn configurable_extensions() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("A.java"), "class A {}").unwrap();
        std::fs::write(dir.path().join("B.kt"), "class B").unwrap();
        let opts = ScanOptions {
            extensions: vec![".kt".into(), "java".into()],
            ..Default::default()
        };
        let (records, _) = scan_source_tree(dir.path(), "p", "1", &opts).unwrap();
        assert_eq!(records.len(), 2);
    }
}
