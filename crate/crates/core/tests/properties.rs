mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use faultline_core::corpus::{token_counts, tokenize, Corpus, FileId};
use faultline_core::features::{Feature, FeatureVector};
use faultline_core::ltr::{chronological_folds, compute_bounds, normalize, rank, Candidate, CategoryModel};
use faultline_core::query::{Feedback, MockProvider, QueryConfig, QueryEngine};
use faultline_core::report::BugReport;
use proptest::prelude::*;

fn report_at(i: usize, secs: i64) -> BugReport {
    BugReport {
        report_id: format!("R-{i}"),
        project: "p".into(),
        version: "1".into(),
        title: "t".into(),
        description: String::new(),
        created_at: Utc.timestamp_opt(secs, 0).unwrap(),
        fixed_files: BTreeSet::new(),
    }
}

fn feature_vectors() -> impl Strategy<Value = Vec<FeatureVector>> {
    proptest::collection::vec(proptest::array::uniform7(0.0f64..50.0), 2..25)
        .prop_map(|rows| rows.into_iter().map(FeatureVector::from_array).collect())
}

proptest! {
    #[test]
    fn tokenize_doubles(x in "[A-Za-z0-9_ .,()]{0,80}") {
        let once = token_counts(&x);
        let twice = token_counts(&format!("{x}\n{x}"));
        let doubled: BTreeMap<String, u32> = once.iter().map(|(t, c)| (t.clone(), c * 2)).collect();
        prop_assert_eq!(twice, doubled);
        prop_assert_eq!(tokenize(&format!("{x}\n{x}")).len(), 2 * tokenize(&x).len());
    }

    #[test]
    fn folds_are_chronological(
        stamps in proptest::collection::vec(0i64..1_000, 0..60),
        k in 0usize..14,
    ) {
        let reports: Vec<BugReport> = stamps.iter().enumerate().map(|(i, s)| report_at(i, s * 86_400)).collect();
        let folds = chronological_folds(&reports, k);
        let expect = if reports.len() < 2 || k < 2 { 0 } else { k.min(reports.len()) - 1 };
        prop_assert_eq!(folds.len(), expect);
        let mut tested = BTreeSet::new();
        for f in &folds {
            prop_assert!(!f.train.is_empty() && !f.test.is_empty());
            let max_train = f.train.iter().map(|&i| reports[i].created_at).max().unwrap();
            let min_test = f.test.iter().map(|&i| reports[i].created_at).min().unwrap();
            prop_assert!(max_train <= min_test);
            let train: BTreeSet<usize> = f.train.iter().copied().collect();
            prop_assert!(f.test.iter().all(|i| !train.contains(i)));
            for &i in &f.test {
                prop_assert!(tested.insert(i), "report tested twice");
            }
        }
        if let Some(first) = folds.first() {
            // every report outside the first subset is tested exactly once
            prop_assert_eq!(tested.len() + first.train.len(), reports.len());
        }
    }

    #[test]
    fn scaling_a_feature_by_power_of_two_keeps_ranking(rows in feature_vectors(), f in 0usize..7, e in -8i32..8) {
        let c = 2f64.powi(e);
        let scaled: Vec<FeatureVector> = rows
            .iter()
            .map(|v| {
                let mut a = v.to_array();
                a[f] *= c;
                FeatureVector::from_array(a)
            })
            .collect();
        let active = Feature::ALL.to_vec();
        let b0 = compute_bounds(&active, &rows);
        let b1 = compute_bounds(&active, &scaled);
        for (x, y) in rows.iter().zip(&scaled) {
            prop_assert_eq!(normalize(x, &active, &b0), normalize(y, &active, &b1));
        }
        let weights = vec![0.7, -0.2, 1.3, 0.4, 0.1, 0.9, -0.5];
        let m0 = CategoryModel::with_weights(active.clone(), weights.clone(), b0);
        let m1 = CategoryModel::with_weights(active.clone(), weights, b1);
        let paths: Vec<String> = (0..rows.len()).map(|i| format!("F{i:02}.java")).collect();
        let cands = |vs: &'_ [FeatureVector]| -> Vec<(FileId, String, FeatureVector)> {
            vs.iter().enumerate().map(|(i, v)| (FileId(i as u32), paths[i].clone(), *v)).collect()
        };
        let order = |m: &CategoryModel, vs: &[FeatureVector]| -> Vec<FileId> {
            let owned = cands(vs);
            let c: Vec<Candidate<'_>> = owned.iter().map(|(id, p, v)| Candidate { file_id: *id, path: p, features: v }).collect();
            rank(m, &c).into_iter().map(|r| r.file_id).collect()
        };
        // f1 also breaks ties, and scaling f1 preserves its order
        prop_assert_eq!(order(&m0, &rows), order(&m1, &scaled));
    }

    #[test]
    fn scaling_by_any_positive_constant_keeps_normalized_vectors(rows in feature_vectors(), f in 0usize..7, c in 0.001f64..1000.0) {
        let scaled: Vec<FeatureVector> = rows
            .iter()
            .map(|v| {
                let mut a = v.to_array();
                a[f] *= c;
                FeatureVector::from_array(a)
            })
            .collect();
        let active = Feature::ALL.to_vec();
        let b0 = compute_bounds(&active, &rows);
        let b1 = compute_bounds(&active, &scaled);
        for (x, y) in rows.iter().zip(&scaled) {
            for (a, b) in normalize(x, &active, &b0).into_iter().zip(normalize(y, &active, &b1)) {
                prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn feedback_classes_never_return(picks in proptest::collection::vec(0usize..8, 1..=5)) {
        let classes = ["Alpha", "Beta", "Gamma", "Delta", "Epsilon", "Zeta", "Eta", "Theta"];
        let sources: Vec<(String, String)> =
            classes.iter().map(|c| (format!("{c}.java"), format!("class {c} {{ void run() {{}} }}"))).collect();
        let corpus = Corpus::from_sources("p", "1", &sources).unwrap();
        // every reply names every class, so only exclusion can remove them
        let mock = MockProvider::default().with_default(classes.join(" "));
        let config = QueryConfig { max_cycles: 5, ..Default::default() };
        let engine = QueryEngine::new(Arc::new(mock), config).unwrap();
        let mut report = report_at(0, 0);
        report.title = "AlphaBeta widget misbehaves in Gamma.run()".into();
        let mut dialogue = engine.start(&report, &corpus.index).unwrap();
        let mut given: BTreeSet<String> = BTreeSet::new();
        for p in picks {
            let current = dialogue.current().unwrap().entities.clone();
            let target = current.get(p % current.len().max(1)).cloned().unwrap_or_else(|| classes[p].to_string());
            let fb = if p % 2 == 0 { Feedback::non_buggy(target.clone()) } else { Feedback::non_existing(target.clone()) };
            given.insert(target.to_lowercase());
            let q = engine.reformulate(&mut dialogue, &report, &[fb], &corpus.index).unwrap();
            for e in &q.entities {
                prop_assert!(!given.contains(&e.to_lowercase()), "{} came back after feedback", e);
            }
        }
    }
}
