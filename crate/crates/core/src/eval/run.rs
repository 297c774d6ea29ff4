//! The evaluation pipeline: classify, query, extract, rank, score.

use std::collections::{BTreeMap, HashSet};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::metrics::{average_precision, first_relevant_rank, map, mrr, reciprocal_rank, top_k};
use super::{CategoryMetrics, EvalResult, ReportOutcome};
use crate::corpus::{CorpusSet, FileId};
use crate::exec::{map_slice, Execution};
use crate::features::{extract_all, Feature, FeatureVector, HistoryIndex};
use crate::ltr::{
    chronological_folds, default_features, fit_or_uniform, rank, Candidate, CategoryModel, RankedFile, RankingModel,
    TrainConfig, TrainingInstance,
};
use crate::query::{Dialogue, Feedback, Query, QueryEngine};
use crate::report::{classify, BugReport, Category};
use crate::{Error, Result};

/// Active features per category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub per_category: BTreeMap<Category, Vec<Feature>>,
}

impl Default for FeatureSelection {
    fn default() -> Self {
        FeatureSelection {
            per_category: Category::ALL.iter().map(|&c| (c, default_features(c))).collect(),
        }
    }
}

impl FeatureSelection {
    pub fn uniform(features: Vec<Feature>) -> Self {
        FeatureSelection {
            per_category: Category::ALL.iter().map(|&c| (c, features.clone())).collect(),
        }
    }

    pub fn for_category(&self, c: Category) -> Vec<Feature> {
        self.per_category
            .get(&c)
            .cloned()
            .unwrap_or_else(|| default_features(c))
    }
}

#[derive(Debug, Clone)]
pub enum ModelSource {
    /// Score with a trained model.
    Fixed(RankingModel),
    /// Train on every report of the category and evaluate on the same reports.
    InSample {
        train: TrainConfig,
        features: FeatureSelection,
    },
    /// Chronological folds; only reports in some test subset are scored.
    CrossValidation {
        folds: usize,
        train: TrainConfig,
        features: FeatureSelection,
    },
}

impl ModelSource {
    fn with_features(&self, features: FeatureSelection) -> Result<Self> {
        match self {
            ModelSource::Fixed(_) => Err(Error::Config("feature subsets need a trainable model source".into())),
            ModelSource::InSample { train, .. } => Ok(ModelSource::InSample {
                train: *train,
                features,
            }),
            ModelSource::CrossValidation { folds, train, .. } => Ok(ModelSource::CrossValidation {
                folds: *folds,
                train: *train,
                features,
            }),
        }
    }
}

/// One report with its query and the features of every corpus file.
#[derive(Debug, Clone)]
pub struct PreparedReport {
    pub report: BugReport,
    pub category: Category,
    pub query: Query,
    pub features: Vec<FeatureVector>,
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub reports: Vec<PreparedReport>,
    pub excluded: Vec<String>,
}

/// Query every report and extract features once, so several models can be scored cheaply.
pub fn prepare(dataset: &[BugReport], corpora: &CorpusSet, engine: &QueryEngine, exec: Execution) -> Result<Prepared> {
    let history = HistoryIndex::from_reports(dataset);
    let mut excluded = Vec::new();
    let mut usable = Vec::new();
    for r in dataset {
        if corpora.get(&r.project, &r.version).is_some() {
            usable.push(r);
        } else {
            warn!("{}: no corpus for {}/{}; excluded", r.report_id, r.project, r.version);
            excluded.push(r.report_id.clone());
        }
    }
    let prepared = map_slice(exec, &usable, |r| -> Result<PreparedReport> {
        let corpus = corpora.get(&r.project, &r.version).expect("filtered above");
        let query = engine.construct_query(r, &corpus.index)?;
        let features = extract_all(r, &query.entities, corpus, &history, Execution::Sequential);
        Ok(PreparedReport {
            report: (*r).clone(),
            category: classify(r),
            query,
            features,
        })
    });
    let reports = prepared.into_iter().collect::<Result<Vec<_>>>()?;
    info!("prepared {} reports, excluded {}", reports.len(), excluded.len());
    Ok(Prepared { reports, excluded })
}

fn instances(p: &PreparedReport, corpora: &CorpusSet) -> Vec<TrainingInstance> {
    let corpus = corpora
        .get(&p.report.project, &p.report.version)
        .expect("prepared report has a corpus");
    corpus
        .files
        .iter()
        .zip(&p.features)
        .map(|(f, v)| TrainingInstance {
            query_id: p.report.report_id.clone(),
            file: f.path.clone(),
            features: *v,
            relevant: p.report.fixed_files.contains(&f.path),
        })
        .collect()
}

fn rank_report(model: &CategoryModel, p: &PreparedReport, corpora: &CorpusSet) -> Vec<RankedFile> {
    let corpus = corpora
        .get(&p.report.project, &p.report.version)
        .expect("prepared report has a corpus");
    let candidates: Vec<Candidate<'_>> = corpus
        .files
        .iter()
        .zip(&p.features)
        .enumerate()
        .map(|(i, (f, v))| Candidate {
            file_id: FileId(i as u32),
            path: &f.path,
            features: v,
        })
        .collect();
    rank(model, &candidates)
}

fn train_category(
    items: &[&PreparedReport],
    corpora: &CorpusSet,
    features: &[Feature],
    config: &TrainConfig,
) -> Result<CategoryModel> {
    let data: Vec<TrainingInstance> = items.iter().flat_map(|p| instances(p, corpora)).collect();
    fit_or_uniform(&data, features, config)
}

/// Train one model per category present in `prepared`, on all of its reports.
pub fn train_model(
    prepared: &Prepared,
    corpora: &CorpusSet,
    features: &FeatureSelection,
    config: &TrainConfig,
) -> Result<RankingModel> {
    let mut model = RankingModel::default();
    for c in Category::ALL {
        let items: Vec<&PreparedReport> = prepared.reports.iter().filter(|p| p.category == c).collect();
        if !items.is_empty() {
            model
                .per_category
                .insert(c, train_category(&items, corpora, &features.for_category(c), config)?);
        }
    }
    if model.per_category.is_empty() {
        return Err(Error::EmptyEvaluation("no report to train on".into()));
    }
    Ok(model)
}

/// Score prepared reports under one model source.
pub fn evaluate(prepared: &Prepared, corpora: &CorpusSet, source: &ModelSource) -> Result<EvalResult> {
    let mut ranked: Vec<(&PreparedReport, Vec<RankedFile>, Option<usize>)> = Vec::new();
    for c in Category::ALL {
        let items: Vec<&PreparedReport> = prepared.reports.iter().filter(|p| p.category == c).collect();
        if items.is_empty() {
            continue;
        }
        match source {
            ModelSource::Fixed(model) => {
                let m = model.category(c)?;
                for p in items {
                    ranked.push((p, rank_report(m, p, corpora), None));
                }
            }
            ModelSource::InSample { train, features } => {
                let m = train_category(&items, corpora, &features.for_category(c), train)?;
                for p in items {
                    ranked.push((p, rank_report(&m, p, corpora), None));
                }
            }
            ModelSource::CrossValidation { folds, train, features } => {
                let reports: Vec<BugReport> = items.iter().map(|p| p.report.clone()).collect();
                for fold in chronological_folds(&reports, *folds) {
                    let train_items: Vec<&PreparedReport> = fold.train.iter().map(|&i| items[i]).collect();
                    let mut m = train_category(&train_items, corpora, &features.for_category(c), train)?;
                    m.fold = Some(fold.fold);
                    for &i in &fold.test {
                        ranked.push((items[i], rank_report(&m, items[i], corpora), Some(fold.fold)));
                    }
                }
            }
        }
    }
    if ranked.is_empty() {
        return Err(Error::EmptyEvaluation("no report was ranked".into()));
    }
    ranked.sort_by(|a, b| a.0.report.report_id.cmp(&b.0.report.report_id));

    let mut per_category = BTreeMap::new();
    let lists: Vec<Vec<String>> = ranked
        .iter()
        .map(|(_, r, _)| r.iter().map(|f| f.path.clone()).collect())
        .collect();
    let relevant: Vec<HashSet<String>> = ranked
        .iter()
        .map(|(p, _, _)| p.report.fixed_files.iter().cloned().collect())
        .collect();
    for c in Category::ALL {
        let idx: Vec<usize> = (0..ranked.len()).filter(|&i| ranked[i].0.category == c).collect();
        if idx.is_empty() {
            continue;
        }
        let l: Vec<Vec<String>> = idx.iter().map(|&i| lists[i].clone()).collect();
        let s: Vec<HashSet<String>> = idx.iter().map(|&i| relevant[i].clone()).collect();
        per_category.insert(c, summarize(&l, &s)?);
    }
    let all = Some(summarize(&lists, &relevant)?);
    let reports = ranked
        .iter()
        .zip(lists.iter().zip(&relevant))
        .map(|((p, _, fold), (l, s))| ReportOutcome {
            report_id: p.report.report_id.clone(),
            category: p.category,
            query: p.query.entities.clone(),
            fallback_query: p.query.fallback,
            first_relevant_rank: first_relevant_rank(l, s),
            reciprocal_rank: reciprocal_rank(l, s),
            average_precision: average_precision(l, s),
            top10: l.iter().take(10).cloned().collect(),
            fold: *fold,
        })
        .collect();
    Ok(EvalResult {
        per_category,
        all,
        excluded: prepared.excluded.clone(),
        reports,
    })
}

fn summarize(lists: &[Vec<String>], relevant: &[HashSet<String>]) -> Result<CategoryMetrics> {
    Ok(CategoryMetrics {
        top1: top_k(lists, relevant, 1)?,
        top5: top_k(lists, relevant, 5)?,
        top10: top_k(lists, relevant, 10)?,
        mrr: mrr(lists, relevant)?,
        map: map(lists, relevant)?,
        n: lists.len(),
    })
}

/// Prepare and evaluate in one go.
pub fn run_eval(
    dataset: &[BugReport],
    corpora: &CorpusSet,
    engine: &QueryEngine,
    source: &ModelSource,
    exec: Execution,
) -> Result<EvalResult> {
    if dataset.is_empty() {
        return Err(Error::EmptyEvaluation("dataset is empty".into()));
    }
    let prepared = prepare(dataset, corpora, engine, exec)?;
    if prepared.reports.is_empty() {
        return Err(Error::EmptyEvaluation("no report has a corpus".into()));
    }
    evaluate(&prepared, corpora, source)
}

/// Rows TS, TS+CL, TS+CL+CG and ALL.
pub fn default_ablation_rows() -> Vec<(String, Vec<Feature>)> {
    vec![
        ("TS".into(), vec![Feature::F3]),
        ("TS+CL".into(), vec![Feature::F3, Feature::F1]),
        ("TS+CL+CG".into(), vec![Feature::F3, Feature::F1, Feature::F2]),
        ("ALL".into(), Feature::ALL.to_vec()),
    ]
}

/// One evaluation per feature subset, every category using that subset.
pub fn ablation(
    prepared: &Prepared,
    corpora: &CorpusSet,
    base: &ModelSource,
    rows: &[(String, Vec<Feature>)],
) -> Result<Vec<(String, EvalResult)>> {
    rows.iter()
        .map(|(name, fs)| {
            let source = base.with_features(FeatureSelection::uniform(fs.clone()))?;
            Ok((name.clone(), evaluate(prepared, corpora, &source)?))
        })
        .collect()
}

/// Outcome of automatic reformulation for the reports whose initial top 10
/// held no fixed file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub cycle: u32,
    /// Reports still unresolved when this cycle started.
    pub attempted: usize,
    /// Reports with a fixed file in the top 10 after this cycle.
    pub resolved: usize,
    /// MRR and MAP over all reports that needed reformulation, at this cycle.
    pub mrr: f64,
    pub map: f64,
}

/// Simulated feedback loop. Feedback for each query entity: not declared in
/// the corpus gives `non_existing_class`; declared only in unfixed files gives
/// `non_buggy_class`. Stops at the engine's `max_cycles`.
pub fn reformulation_experiment(
    prepared: &Prepared,
    corpora: &CorpusSet,
    engine: &QueryEngine,
    model: &RankingModel,
    dataset: &[BugReport],
) -> Result<Vec<CycleRow>> {
    let history = HistoryIndex::from_reports(dataset);
    struct Live<'a> {
        p: &'a PreparedReport,
        dialogue: Dialogue,
        list: Vec<String>,
        done: bool,
    }
    let mut live = Vec::new();
    for p in &prepared.reports {
        let corpus = corpora
            .get(&p.report.project, &p.report.version)
            .expect("prepared report has a corpus");
        let list: Vec<String> = rank_report(model.category(p.category)?, p, corpora)
            .into_iter()
            .map(|r| r.path)
            .collect();
        let relevant: HashSet<String> = p.report.fixed_files.iter().cloned().collect();
        if super::hit_at_k(&list, &relevant, 10) {
            continue;
        }
        let dialogue = engine.start(&p.report, &corpus.index)?;
        live.push(Live {
            p,
            dialogue,
            list,
            done: false,
        });
    }
    let mut rows = Vec::new();
    for cycle in 1..=engine.config().max_cycles {
        let attempted = live.iter().filter(|l| !l.done).count();
        if attempted == 0 {
            break;
        }
        for l in live.iter_mut().filter(|l| !l.done) {
            let corpus = corpora.get(&l.p.report.project, &l.p.report.version).expect("corpus");
            let feedback = simulated_feedback(l.dialogue.current(), &l.p.report, corpus);
            if feedback.is_empty() {
                continue;
            }
            let q = engine.reformulate(&mut l.dialogue, &l.p.report, &feedback, &corpus.index)?;
            let features = extract_all(&l.p.report, &q.entities, corpus, &history, Execution::Sequential);
            let p2 = PreparedReport {
                features,
                query: q,
                ..l.p.clone()
            };
            l.list = rank_report(model.category(l.p.category)?, &p2, corpora)
                .into_iter()
                .map(|r| r.path)
                .collect();
            let relevant: HashSet<String> = l.p.report.fixed_files.iter().cloned().collect();
            l.done = super::hit_at_k(&l.list, &relevant, 10);
        }
        let lists: Vec<Vec<String>> = live.iter().map(|l| l.list.clone()).collect();
        let sets: Vec<HashSet<String>> = live
            .iter()
            .map(|l| l.p.report.fixed_files.iter().cloned().collect())
            .collect();
        rows.push(CycleRow {
            cycle,
            attempted,
            resolved: live.iter().filter(|l| l.done).count(),
            mrr: mrr(&lists, &sets)?,
            map: map(&lists, &sets)?,
        });
    }
    Ok(rows)
}

fn simulated_feedback(query: Option<&Query>, report: &BugReport, corpus: &crate::corpus::Corpus) -> Vec<Feedback> {
    let Some(q) = query else { return Vec::new() };
    let mut out = Vec::new();
    for e in &q.entities {
        if !crate::corpus::is_identifier(e) {
            continue;
        }
        match corpus.index.files_declaring(e) {
            None if e.chars().next().is_some_and(char::is_uppercase) => out.push(Feedback::non_existing(e.clone())),
            Some(files)
                if files
                    .iter()
                    .all(|f| !report.fixed_files.contains(&corpus.file(*f).path)) =>
            {
                out.push(Feedback::non_buggy(e.clone()))
            }
            _ => {}
        }
    }
    out
}
