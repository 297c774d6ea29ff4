//! Tab-separated feature rows.
//!
//! Header `report_id category file_id path f1 f2 f3 f4 f5 f6 f7`, one row
//! per (report, file). Floats are written in Rust's shortest round-trip form.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{FeatureVector, FEATURE_COUNT};
use crate::corpus::FileId;
use crate::report::Category;
use crate::{Error, Result};

const HEADER: &str = "report_id\tcategory\tfile_id\tpath\tf1\tf2\tf3\tf4\tf5\tf6\tf7";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub report_id: String,
    pub category: Category,
    pub file_id: FileId,
    pub path: String,
    pub features: FeatureVector,
}

pub fn write_feature_table(mut out: impl Write, rows: &[FeatureRow]) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        write!(out, "{}\t{}\t{}\t{}", r.report_id, r.category, r.file_id, r.path)?;
        for v in r.features.to_array() {
            write!(out, "\t{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_feature_table(input: impl BufRead, source: &str) -> Result<Vec<FeatureRow>> {
    let bad = |line: usize, msg: String| Error::Config(format!("{source}:{line}: {msg}"));
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if i == 0 {
            if line.trim_end() != HEADER {
                return Err(bad(1, "missing feature table header".into()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 + FEATURE_COUNT {
            return Err(bad(
                i + 1,
                format!("expected {} columns, found {}", 4 + FEATURE_COUNT, cols.len()),
            ));
        }
        let category: Category = cols[1]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad category {:?}", cols[1])))?;
        let mut values = [0.0; FEATURE_COUNT];
        for (k, v) in values.iter_mut().enumerate() {
            *v = cols[4 + k]
                .parse()
                .map_err(|_| bad(i + 1, format!("bad number {:?}", cols[4 + k])))?;
        }
        rows.push(FeatureRow {
            report_id: cols[0].to_string(),
            category,
            file_id: FileId(
                cols[2]
                    .parse()
                    .map_err(|_| bad(i + 1, format!("bad file id {:?}", cols[2])))?,
            ),
            path: cols[3].to_string(),
            features: FeatureVector::from_array(values),
        });
    }
    Ok(rows)
}
