use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use faultline_core::corpus::{Corpus, CorpusSet, ScanOptions};
use faultline_core::eval::{
    ablation, ablation_table, default_ablation_rows, evaluate, prepare, reformulation_experiment, shots_table,
    summary_table, EvalResult, FeatureSelection, ModelSource, TextTable,
};
use faultline_core::exec::Execution;
use faultline_core::features::{
    extract_all, parse_feature_subset, read_feature_table, write_feature_table, FeatureRow, HistoryIndex,
};
use faultline_core::ltr::{fit_or_uniform, rank, Candidate, RankingModel, TrainConfig, TrainingInstance};
use faultline_core::query::{
    HttpProvider, HttpProviderConfig, LlmProvider, MockProvider, ProviderFailurePolicy, Query, QueryConfig,
    QueryEngine, ShotMode,
};
use faultline_core::report::{classify, load_reports, BugReport, Category};
use faultline_core::session::{FileStore, MemoryStore, SessionManager, SessionStore};
use faultline_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "faultline", version, about = "Bug report driven fault localization")]
struct Cli {
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a source tree and write its index.
    Ingest {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        project: String,
        #[arg(long)]
        version: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print `report_id<TAB>category` for every report.
    Classify {
        #[arg(long)]
        reports: PathBuf,
    },
    /// Build a query per report; JSON Lines on stdout or --out.
    Query {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute f1..f7 for every (report, file) pair.
    ExtractFeatures {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one ranking model per category from a feature table.
    Train {
        /// One or more feature tables (e.g. one per corpus).
        #[arg(long, num_args = 1.., required = true)]
        features: Vec<PathBuf>,
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Feature subset for every category, e.g. TS,CL,CG. Per-category defaults otherwise.
        #[arg(long)]
        subset: Option<String>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Rank the files of each report in a feature table.
    Rank {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Evaluate on a dataset and report Top@K, MRR and MAP.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        /// Trained model; chronological cross-validation when absent.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the summary table.
        #[arg(long)]
        table: bool,
        /// Also run with 0 and 1 shots and print the comparison.
        #[arg(long)]
        compare_shots: bool,
        /// Also run the simulated reformulation loop (needs --model).
        #[arg(long)]
        cycles: bool,
    },
    /// Evaluate the feature subsets TS, TS+CL, TS+CL+CG and ALL.
    Ablation {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Train and test on the same reports instead of chronological folds.
        #[arg(long)]
        in_sample: bool,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the session HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        corpus_dir: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Event log for sessions; in-memory when absent.
        #[arg(long)]
        sessions: Option<PathBuf>,
        /// Past reports with fixed files, for the history features.
        #[arg(long)]
        history: Option<PathBuf>,
        /// Directory served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderKind {
    Mock,
    Http,
}

#[derive(Args)]
struct ProviderArgs {
    #[arg(long, value_enum, default_value = "mock")]
    provider: ProviderKind,
    /// Mock reply fixtures (JSON).
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    shots: u8,
    #[arg(long, default_value_t = 1)]
    max_cycles: u32,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    corpus_dir: PathBuf,
    #[command(flatten)]
    provider: ProviderArgs,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 0.01)]
    c: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl TrainArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            c: self.c,
            epochs: self.epochs,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

/// One line of `query` output.
#[derive(Serialize, Deserialize)]
struct QueryRecord {
    report_id: String,
    #[serde(flatten)]
    query: Query,
}

impl ProviderArgs {
    fn provider(&self) -> Result<Arc<dyn LlmProvider>> {
        match self.provider {
            ProviderKind::Mock => {
                let path = self.fixtures.as_ref().context("--provider mock needs --fixtures")?;
                Ok(Arc::new(MockProvider::load(path)?))
            }
            ProviderKind::Http => http_provider(),
        }
    }

    fn engine(&self, policy: ProviderFailurePolicy) -> Result<QueryEngine> {
        self.engine_with(policy, self.shot_mode()?)
    }

    fn engine_with(&self, policy: ProviderFailurePolicy, shot_mode: ShotMode) -> Result<QueryEngine> {
        let config = QueryConfig {
            shot_mode,
            max_cycles: self.max_cycles,
            on_provider_failure: policy,
            ..QueryConfig::default()
        };
        Ok(QueryEngine::new(self.provider()?, config)?)
    }

    fn shot_mode(&self) -> Result<ShotMode> {
        ShotMode::from_shots(self.shots).context("--shots must be 0 or 1")
    }
}

fn http_provider() -> Result<Arc<dyn LlmProvider>> {
    Ok(Arc::new(HttpProvider::new(HttpProviderConfig::from_env()?)?))
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_queries(path: &Path) -> Result<BTreeMap<String, Query>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: QueryRecord = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        out.insert(rec.report_id, rec.query);
    }
    Ok(out)
}

fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_feature_table(BufReader::new(file), &path.display().to_string())?)
}

fn for_corpus<'a>(reports: &'a [BugReport], corpus: &Corpus) -> Vec<&'a BugReport> {
    reports
        .iter()
        .filter(|r| {
            let ok = r.project == corpus.project && r.version == corpus.version;
            if !ok {
                log::debug!(
                    "{}: belongs to {}/{}, not this index; skipped",
                    r.report_id,
                    r.project,
                    r.version
                );
            }
            ok
        })
        .collect()
}

fn print_table(t: &TextTable) {
    print!("{}", t.render());
}

fn run(cli: Cli) -> Result<()> {
    let exec = execution(cli.sequential);
    match cli.command {
        Command::Ingest {
            root,
            project,
            version,
            out,
        } => {
            let options = ScanOptions {
                execution: exec,
                ..ScanOptions::default()
            };
            let (corpus, report) = Corpus::ingest(&root, &project, &version, &options)?;
            for s in &report.skipped {
                log::warn!("skipped {}: {}", s.path.display(), s.reason);
            }
            corpus.save(&out)?;
            eprintln!(
                "indexed {} files ({} skipped), {} edges, {} terms",
                corpus.len(),
                report.skipped.len(),
                corpus.graph.edges().len(),
                corpus.index.vocabulary().len()
            );
        }
        Command::Classify { reports } => {
            let mut out = std::io::stdout().lock();
            for r in load_reports(&reports)? {
                writeln!(out, "{}\t{}", r.report_id, classify(&r))?;
            }
        }
        Command::Query {
            reports,
            index,
            provider,
            out,
        } => {
            let corpus = Corpus::load(&index)?;
            let engine = provider.engine(ProviderFailurePolicy::Fallback)?;
            let reports = load_reports(&reports)?;
            let mut w = output(out.as_deref())?;
            for r in for_corpus(&reports, &corpus) {
                let query = engine.construct_query(r, &corpus.index)?;
                let line = serde_json::to_string(&QueryRecord {
                    report_id: r.report_id.clone(),
                    query,
                })?;
                writeln!(w, "{line}")?;
            }
        }
        Command::ExtractFeatures {
            reports,
            queries,
            index,
            out,
        } => {
            let corpus = Corpus::load(&index)?;
            let reports = load_reports(&reports)?;
            let queries = read_queries(&queries)?;
            let history = HistoryIndex::from_reports(&reports);
            let mut rows = Vec::new();
            for r in for_corpus(&reports, &corpus) {
                let Some(q) = queries.get(&r.report_id) else {
                    log::warn!("{}: no query; skipped", r.report_id);
                    continue;
                };
                let vectors = extract_all(r, &q.entities, &corpus, &history, exec);
                for (f, v) in corpus.files.iter().zip(vectors) {
                    rows.push(FeatureRow {
                        report_id: r.report_id.clone(),
                        category: q.category,
                        file_id: f.file_id,
                        path: f.path.clone(),
                        features: v,
                    });
                }
            }
            write_feature_table(BufWriter::new(File::create(&out)?), &rows)?;
            eprintln!("wrote {} rows", rows.len());
        }
        Command::Train {
            features,
            reports,
            out,
            subset,
            train,
        } => {
            let mut rows = Vec::new();
            for path in &features {
                rows.extend(read_features(path)?);
            }
            let reports: BTreeMap<String, BugReport> = load_reports(&reports)?
                .into_iter()
                .map(|r| (r.report_id.clone(), r))
                .collect();
            let selection = match subset {
                Some(s) => FeatureSelection::uniform(parse_feature_subset(&s)?),
                None => FeatureSelection::default(),
            };
            let mut per_category: BTreeMap<Category, Vec<TrainingInstance>> = BTreeMap::new();
            for row in rows {
                let Some(r) = reports.get(&row.report_id) else {
                    log::warn!("{}: not in reports; row skipped", row.report_id);
                    continue;
                };
                per_category.entry(row.category).or_default().push(TrainingInstance {
                    query_id: row.report_id,
                    relevant: r.fixed_files.contains(&row.path),
                    file: row.path,
                    features: row.features,
                });
            }
            let mut model = RankingModel::default();
            for (c, data) in per_category {
                model
                    .per_category
                    .insert(c, fit_or_uniform(&data, &selection.for_category(c), &train.config())?);
            }
            if model.per_category.is_empty() {
                bail!("feature table has no rows for known reports");
            }
            model.save(&out)?;
        }
        Command::Rank { model, features, top } => {
            let model = RankingModel::load(&model)?;
            let rows = read_features(&features)?;
            let mut by_report: BTreeMap<&str, Vec<&FeatureRow>> = BTreeMap::new();
            for r in &rows {
                by_report.entry(&r.report_id).or_default().push(r);
            }
            let mut out = std::io::stdout().lock();
            writeln!(out, "report_id\trank\tfile_id\tpath\tscore")?;
            for (id, rs) in by_report {
                let m = model.category(rs[0].category)?;
                let candidates: Vec<Candidate<'_>> = rs
                    .iter()
                    .map(|r| Candidate {
                        file_id: r.file_id,
                        path: &r.path,
                        features: &r.features,
                    })
                    .collect();
                for (i, f) in rank(m, &candidates).into_iter().take(top).enumerate() {
                    writeln!(out, "{id}\t{}\t{}\t{}\t{:.6}", i + 1, f.file_id, f.path, f.score)?;
                }
            }
        }
        Command::Eval {
            data,
            model,
            folds,
            train,
            out,
            table,
            compare_shots,
            cycles,
        } => {
            let dataset = load_reports(&data.dataset)?;
            if dataset.is_empty() {
                return Err(Error::EmptyEvaluation("dataset is empty".into()).into());
            }
            let corpora = CorpusSet::load_dir(
                &data.corpus_dir,
                &ScanOptions {
                    execution: exec,
                    ..Default::default()
                },
            )?;
            let fixed = model.as_deref().map(RankingModel::load).transpose()?;
            let source = match &fixed {
                Some(m) => ModelSource::Fixed(m.clone()),
                None => ModelSource::CrossValidation {
                    folds,
                    train: train.config(),
                    features: FeatureSelection::default(),
                },
            };
            let engine = data.provider.engine(ProviderFailurePolicy::Fallback)?;
            let prepared = prepare(&dataset, &corpora, &engine, exec)?;
            if prepared.reports.is_empty() {
                return Err(Error::EmptyEvaluation("no report has a corpus".into()).into());
            }
            let result = evaluate(&prepared, &corpora, &source)?;
            let mut doc = serde_json::json!({ "result": result, "table": summary_table(&[("faultline", &result)]) });
            if table {
                print_table(&summary_table(&[("faultline", &result)]));
            }
            if compare_shots {
                let mut runs: Vec<(ShotMode, EvalResult)> = Vec::new();
                for mode in [ShotMode::ZeroShot, ShotMode::OneShot] {
                    let e = data.provider.engine_with(ProviderFailurePolicy::Fallback, mode)?;
                    runs.push((
                        mode,
                        evaluate(&prepare(&dataset, &corpora, &e, exec)?, &corpora, &source)?,
                    ));
                }
                let t = shots_table(&runs);
                print_table(&t);
                doc["shots_table"] = serde_json::to_value(&t)?;
            }
            if cycles {
                let Some(m) = &fixed else {
                    bail!("--cycles needs --model")
                };
                let rows = reformulation_experiment(&prepared, &corpora, &engine, m, &dataset)?;
                let t = TextTable {
                    title: "Reformulation cycles".into(),
                    columns: ["Cycle", "Attempted", "Resolved", "MRR", "MAP"]
                        .map(String::from)
                        .to_vec(),
                    rows: rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.cycle.to_string(),
                                r.attempted.to_string(),
                                r.resolved.to_string(),
                                format!("{:.4}", r.mrr),
                                format!("{:.4}", r.map),
                            ]
                        })
                        .collect(),
                };
                if rows.is_empty() {
                    println!("Reformulation cycles: every report already has a hit in the top 10");
                } else {
                    print_table(&t);
                }
                doc["cycles"] = serde_json::to_value(&rows)?;
            }
            if let Some(path) = out.as_deref() {
                write_json(Some(path), &doc)?;
            } else if !table && !compare_shots && !cycles {
                write_json(None, &doc)?;
            }
        }
        Command::Ablation {
            data,
            folds,
            in_sample,
            train,
            out,
        } => {
            let dataset = load_reports(&data.dataset)?;
            if dataset.is_empty() {
                return Err(Error::EmptyEvaluation("dataset is empty".into()).into());
            }
            let corpora = CorpusSet::load_dir(
                &data.corpus_dir,
                &ScanOptions {
                    execution: exec,
                    ..Default::default()
                },
            )?;
            let engine = data.provider.engine(ProviderFailurePolicy::Fallback)?;
            let prepared = prepare(&dataset, &corpora, &engine, exec)?;
            if prepared.reports.is_empty() {
                return Err(Error::EmptyEvaluation("no report has a corpus".into()).into());
            }
            let base = if in_sample {
                ModelSource::InSample {
                    train: train.config(),
                    features: FeatureSelection::default(),
                }
            } else {
                ModelSource::CrossValidation {
                    folds,
                    train: train.config(),
                    features: FeatureSelection::default(),
                }
            };
            let rows = ablation(&prepared, &corpora, &base, &default_ablation_rows())?;
            let t = ablation_table(&rows);
            print_table(&t);
            if let Some(path) = out.as_deref() {
                let results: BTreeMap<&str, &EvalResult> = rows.iter().map(|(n, r)| (n.as_str(), r)).collect();
                write_json(Some(path), &serde_json::json!({ "rows": results, "table": t }))?;
            }
        }
        Command::Serve {
            port,
            host,
            corpus_dir,
            model,
            provider,
            sessions,
            history,
            static_dir,
        } => {
            let corpora = CorpusSet::load_dir(
                &corpus_dir,
                &ScanOptions {
                    execution: exec,
                    ..Default::default()
                },
            )?;
            if corpora.is_empty() {
                bail!("no corpus found under {}", corpus_dir.display());
            }
            let model = RankingModel::load(&model)?;
            let engine = provider.engine(ProviderFailurePolicy::Propagate)?;
            let history = match history {
                Some(p) => HistoryIndex::from_reports(&load_reports(&p)?),
                None => HistoryIndex::default(),
            };
            let store: Box<dyn SessionStore> = match sessions {
                Some(p) => Box::new(FileStore::open(&p)?),
                None => Box::new(MemoryStore::new()),
            };
            let manager = Arc::new(SessionManager::new(corpora, model, engine, history, store)?);
            let addr: SocketAddr = format!("{host}:{port}").parse().context("bad --host/--port")?;
            let app = faultline_service::router(manager, static_dir);
            tokio::runtime::Runtime::new()?.block_on(faultline_service::serve(addr, app))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::EmptyEvaluation(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
