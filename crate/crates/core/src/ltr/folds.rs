//! Time-ordered folds: train on every earlier subset, test on the next.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::report::BugReport;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    /// 1-based fold number.
    pub fold: usize,
    /// Indices into the input slice.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Sort by (created_at, report_id), cut into `k` contiguous subsets (earlier
/// subsets take the remainder) and emit the `k - 1` cumulative folds.
pub fn chronological_folds(reports: &[BugReport], k: usize) -> Vec<FoldSpec> {
    let n = reports.len();
    let mut k = k.max(1);
    if n < k {
        warn!("only {n} reports; reducing folds from {k} to {n}");
        k = n;
    }
    if k < 2 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (reports[a].created_at, &reports[a].report_id).cmp(&(reports[b].created_at, &reports[b].report_id))
    });
    let mut subsets = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = n / k + usize::from(i < n % k);
        subsets.push(order[start..start + size].to_vec());
        start += size;
    }
    (1..k)
        .map(|j| FoldSpec {
            fold: j,
            train: subsets[..j].concat(),
            test: subsets[j].clone(),
        })
        .collect()
}
