//! One PASS/FAIL line per primary acceptance criterion, each under its runtime limit.
//!
//! Run with `cargo test -p faultline-cli --test acceptance -- --nocapture` to see the report.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use common::oracle::{ap, counts, hit, mean, metric_fixture, rr, synthetic_ranking_data, Oracle};
use faultline_core::corpus::{Corpus, ScanOptions};
use faultline_core::eval::{average_precision, map, mrr, reciprocal_rank, top_k};
use faultline_core::exec::Execution;
use faultline_core::features::{extract_all, Feature, HistoryIndex};
use faultline_core::ltr::{chronological_folds, fit, pairwise_accuracy, Bounds, TrainConfig};
use faultline_core::query::{Feedback, MockProvider, QueryConfig, QueryEngine};
use faultline_core::report::{classify, classify_text, load_reports, BugReport, Category};
use faultline_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn metric_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let fx: Vec<_> = (0..200).map(|_| metric_fixture(&mut rng)).collect();
    let mut worst: f64 = 0.0;
    for (r, s) in &fx {
        worst = worst.max((reciprocal_rank(r, s) - rr(r, s)).abs());
        worst = worst.max((average_precision(r, s) - ap(r, s)).abs());
    }
    let lists: Vec<Vec<String>> = fx.iter().map(|f| f.0.clone()).collect();
    let sets: Vec<HashSet<String>> = fx.iter().map(|f| f.1.clone()).collect();
    worst = worst.max((mrr(&lists, &sets).unwrap() - mean(fx.iter().map(|(r, s)| rr(r, s)))).abs());
    worst = worst.max((map(&lists, &sets).unwrap() - mean(fx.iter().map(|(r, s)| ap(r, s)))).abs());
    for k in [1, 5, 10] {
        let want = mean(fx.iter().map(|(r, s)| f64::from(u8::from(hit(r, s, k)))));
        worst = worst.max((top_k(&lists, &sets, k).unwrap() - want).abs());
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e}");
    let singles: Vec<HashSet<String>> = sets.iter().map(|s| s.iter().take(1).cloned().collect()).collect();
    ensure!(
        map(&lists, &singles).unwrap() == mrr(&lists, &singles).unwrap(),
        "singleton MAP != MRR"
    );
    Ok(format!("200 fixtures, max deviation {worst:.1e}"))
}

fn classifier() -> Check {
    let reports = common::mini_reports();
    for (id, want) in [
        ("COMPRESS-357", Category::PE),
        ("CAMEL-620", Category::ST),
        ("CAMEL-2320", Category::NL),
    ] {
        let got = classify(reports.iter().find(|r| r.report_id == id).unwrap());
        ensure!(got == want, "{id}: {got} != {want}");
    }
    let text = std::fs::read_to_string(common::fixtures().join("classify/cases.jsonl")).unwrap();
    let mut n = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let want: Category = serde_json::from_value(v["expected"].clone()).unwrap();
        let got = classify_text(v["text"].as_str().unwrap());
        ensure!(got == want, "{}: {got} != {want}", v["id"]);
        n += 1;
    }
    ensure!(n == 30, "{n} synthetic cases");
    Ok("3 worked examples + 30 synthetic (10 per category)".into())
}

fn feature_math() -> Check {
    let root = common::fixtures().join("features");
    let corpus = Corpus::ingest(&root.join("corpus"), "fx", "1.0", &ScanOptions::default())
        .unwrap()
        .0;
    let reports = load_reports(&root.join("reports.jsonl")).unwrap();
    let target = reports.iter().find(|r| r.report_id == "FX-4").unwrap();
    let entities: Vec<String> = [
        "BZip2CompressorOutputStream",
        "CRC",
        "BlockSort",
        "FallbackState",
        "finish",
        "Missing",
    ]
    .map(String::from)
    .to_vec();
    let got = extract_all(
        target,
        &entities,
        &corpus,
        &HistoryIndex::from_reports(&reports),
        Execution::Parallel,
    );
    let by_name = |n: &str| got[corpus.files.iter().position(|f| f.path.ends_with(n)).unwrap()];
    let f1: Vec<f64> = [
        "BZip2CompressorOutputStream.java",
        "BlockSort.java",
        "CRC.java",
        "CompressorOutputStream.java",
    ]
    .iter()
    .map(|n| by_name(&format!("/{n}")).f1_class_match)
    .collect();
    ensure!(f1 == [27.0, 22.0, 3.0, 0.0], "f1 {f1:?}");
    for f in &corpus.files {
        let mut sum = 0.0;
        for &(a, b) in corpus.graph.edges() {
            if a == f.file_id {
                sum += got[b.index()].f1_class_match;
            }
            if b == f.file_id {
                sum += got[a.index()].f1_class_match;
            }
        }
        ensure!(got[f.file_id.index()].f2_call_graph == sum, "f2 of {}", f.path);
    }
    let texts: Vec<&str> = corpus.files.iter().map(|f| f.raw_text.as_str()).collect();
    let o = Oracle::new(&texts);
    let rv = o.vec(&counts(&format!("{}\n{}", target.title, target.description)));
    let mut worst: f64 = 0.0;
    for f in &corpus.files {
        let v = got[f.file_id.index()];
        let f3 = Oracle::cosine(&rv, &o.vec(&counts(&f.raw_text)));
        let f4 = std::iter::once(f.api_text.as_str())
            .chain(f.method_apis.iter().map(|m| m.text.as_str()))
            .map(|t| Oracle::cosine(&rv, &o.vec(&counts(t))))
            .fold(0.0, f64::max);
        let prior: Vec<&BugReport> = reports
            .iter()
            .filter(|p| p.created_at < target.created_at && p.fixed_files.contains(&f.path))
            .collect();
        let mut fixes = BTreeMap::new();
        for p in &prior {
            for (t, n) in counts(&format!("{}\n{}", p.title, p.description)) {
                *fixes.entry(t).or_insert(0.0) += n;
            }
        }
        let f5 = Oracle::cosine(&rv, &o.vec(&fixes));
        let f6 = prior
            .iter()
            .map(|p| p.month())
            .max()
            .map_or(0.0, |m| 1.0 / ((target.month() - m) as f64 + 1.0));
        let f7 = prior.len() as f64;
        for (a, b) in [
            (v.f3_text_sim, f3),
            (v.f4_api_sim, f4),
            (v.f5_collab, f5),
            (v.f6_recency, f6),
            (v.f7_frequency, f7),
        ] {
            worst = worst.max((a - b).abs());
        }
    }
    ensure!(worst <= 1e-12, "f3..f7 max deviation {worst:e}");
    let f6: Vec<f64> = ["/BZip2CompressorOutputStream.java", "/CRC.java", "/BlockSort.java"]
        .iter()
        .map(|n| by_name(n).f6_recency)
        .collect();
    ensure!(f6 == [0.25, 1.0, 0.0], "f6 cases {f6:?}");
    Ok(format!(
        "f1 incl. 27, f2 brute force, f3..f7 max deviation {worst:.1e}, f6 in {{0, 0.25, 1}}"
    ))
}

fn normalization() -> Check {
    let b = Bounds { min: 2.0, max: 6.0 };
    ensure!(b.normalize(-1.0) == 0.0, "clamp below");
    ensure!(b.normalize(7.5) == 1.0, "clamp above");
    ensure!(b.normalize(5.0) == 0.75, "interior");
    ensure!(Bounds { min: 3.0, max: 3.0 }.normalize(3.0) == 0.0, "degenerate");
    ensure!(Bounds { min: 3.0, max: 3.0 }.normalize(9.0) == 0.0, "degenerate above");
    Ok("clamp-below, clamp-above, interior, degenerate".into())
}

fn ltr_recovery() -> Check {
    let active = [Feature::F1, Feature::F2, Feature::F3];
    let train = synthetic_ranking_data(1, 60, [2.0, 1.0, 0.0], 0.1);
    let held = synthetic_ranking_data(2, 40, [2.0, 1.0, 0.0], 0.1);
    let a = fit(&train, &active, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let b = fit(&train, &active, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let acc = pairwise_accuracy(&a, &held).unwrap();
    ensure!(acc >= 0.95, "held-out pairwise accuracy {acc:.4}");
    let bits = |w: &[f64]| w.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    ensure!(bits(&a.weights) == bits(&b.weights), "weights differ between runs");
    Ok(format!(
        "held-out pairwise accuracy {:.2}%, bit-identical reruns",
        acc * 100.0
    ))
}

fn chronological_hygiene() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut folds_seen = 0;
    for case in 0..500 {
        let n = rng.random_range(0..80);
        let reports: Vec<BugReport> = (0..n)
            .map(|i| BugReport {
                report_id: format!("R{i}"),
                project: "p".into(),
                version: "1".into(),
                title: "t".into(),
                description: String::new(),
                created_at: Utc.timestamp_opt(rng.random_range(0..400) * 86_400, 0).unwrap(),
                fixed_files: Default::default(),
            })
            .collect();
        let k = rng.random_range(0..15);
        for f in chronological_folds(&reports, k) {
            let max_train = f.train.iter().map(|&i| reports[i].created_at).max();
            let min_test = f.test.iter().map(|&i| reports[i].created_at).min();
            ensure!(
                max_train <= min_test,
                "case {case} fold {}: train reaches past test",
                f.fold
            );
            folds_seen += 1;
        }
    }
    Ok(format!("500 random datasets, {folds_seen} folds"))
}

fn faultline() -> Command {
    Command::new(env!("CARGO_BIN_EXE_faultline"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = faultline().args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn mini_args(cmd: &str) -> Vec<String> {
    let mini = common::fixtures().join("mini");
    let p = |s: &str| mini.join(s).display().to_string();
    [
        cmd,
        "--dataset",
        &p("reports.jsonl"),
        "--corpus-dir",
        &p("corpora"),
        "--provider",
        "mock",
        "--fixtures",
        &p("mock.json"),
    ]
    .map(String::from)
    .to_vec()
}

fn end_to_end(dir: &Path) -> Check {
    let model = common::fixtures().join("mini/model.json").display().to_string();
    let mut outs = Vec::new();
    for i in 0..2 {
        let out = dir.join(format!("results{i}.json")).display().to_string();
        let mut args = mini_args("eval");
        args.extend(["--model".into(), model.clone(), "--out".into(), out.clone()]);
        run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
        outs.push(std::fs::read(&out).unwrap());
    }
    ensure!(outs[0] == outs[1], "results differ between runs");
    let v: serde_json::Value = serde_json::from_slice(&outs[0]).unwrap();
    let all = &v["result"]["all"];
    let (top1, top10, n) = (
        all["top1"].as_f64().unwrap(),
        all["top10"].as_f64().unwrap(),
        all["n"].as_u64().unwrap(),
    );
    ensure!(n == 12, "{n} reports evaluated");
    ensure!(top10 == 1.0, "Top10 {top10}");
    ensure!(top1 >= 0.75, "Top1 {top1}");
    Ok(format!(
        "n=12, Top1 {:.2}%, Top10 {:.2}%, identical reruns",
        top1 * 100.0,
        top10 * 100.0
    ))
}

fn reformulation_contract() -> Check {
    let corpora = common::mini_corpora();
    let corpus = corpora.get("camel", "1.6").unwrap();
    let report = common::mini_reports()
        .into_iter()
        .find(|r| r.report_id == "CAMEL-620")
        .unwrap();

    let engine = common::mini_engine(QueryConfig::default());
    let mut d = engine.start(&report, &corpus.index).map_err(|e| e.to_string())?;
    let q = engine
        .reformulate(
            &mut d,
            &report,
            &[Feedback::non_existing("ResequencerTest")],
            &corpus.index,
        )
        .map_err(|e| e.to_string())?;
    ensure!(
        !q.entities.iter().any(|e| e == "ResequencerTest"),
        "excluded class returned: {:?}",
        q.entities
    );
    let second = engine.reformulate(
        &mut d,
        &report,
        &[Feedback::non_buggy("ResequencerType")],
        &corpus.index,
    );
    ensure!(
        matches!(second, Err(Error::SessionExhausted { max_cycles: 1 })),
        "default budget allowed a second cycle"
    );

    let names = [
        "ResequencerType",
        "StreamResequencer",
        "Resequencer",
        "ProcessorType",
        "RouteType",
        "DefaultExchange",
    ];
    let mock = MockProvider::default().with_default(names.join(" "));
    let five = QueryEngine::new(
        Arc::new(mock),
        QueryConfig {
            max_cycles: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let mut d = five.start(&report, &corpus.index).map_err(|e| e.to_string())?;
    for n in &names[..5] {
        five.reformulate(&mut d, &report, &[Feedback::non_buggy(*n)], &corpus.index)
            .map_err(|e| e.to_string())?;
    }
    let sixth = five.reformulate(&mut d, &report, &[Feedback::non_buggy(names[5])], &corpus.index);
    ensure!(
        matches!(sixth, Err(Error::SessionExhausted { max_cycles: 5 })),
        "sixth attempt: {sixth:?}"
    );
    Ok("exclusion, 1 cycle by default, 6th of 5 rejected".into())
}

fn ablation_harness() -> Check {
    let model = common::fixtures().join("mini/model.json").display().to_string();
    let mut eval = mini_args("eval");
    eval.extend(["--model".into(), model, "--table".into()]);
    let eval: Vec<&str> = eval.iter().map(String::as_str).collect();
    let abl = mini_args("ablation");
    let abl: Vec<&str> = abl.iter().map(String::as_str).collect();
    let t4 = run_cli(&eval)?;
    ensure!(t4 == run_cli(&eval)?, "eval table not byte-stable");
    let t5 = run_cli(&abl)?;
    ensure!(t5 == run_cli(&abl)?, "ablation table not byte-stable");
    let t4 = String::from_utf8(t4).unwrap();
    let t5 = String::from_utf8(t5).unwrap();
    let first_col = |t: &str| {
        t.lines()
            .skip(3)
            .map(|l| l.split_whitespace().next().unwrap_or("").to_string())
            .collect::<Vec<_>>()
    };
    let header = |t: &str| {
        t.lines()
            .nth(1)
            .unwrap_or("")
            .split("  ")
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect::<Vec<_>>()
    };
    ensure!(
        first_col(&t4) == ["PE", "ST", "NL", "ALL"],
        "summary table rows {:?}",
        first_col(&t4)
    );
    ensure!(
        header(&t4) == ["Tech", "Top1", "Top5", "Top10", "MRR", "MAP"],
        "summary table columns {:?}",
        header(&t4)
    );
    ensure!(
        first_col(&t5) == ["TS", "TS+CL", "TS+CL+CG", "ALL"],
        "ablation table rows {:?}",
        first_col(&t5)
    );
    let want5 = ["Features", "PE MRR", "PE MAP", "ST MRR", "ST MAP", "NL MRR", "NL MAP"];
    ensure!(header(&t5) == want5, "ablation table columns {:?}", header(&t5));
    Ok("summary and ablation table layouts, byte-stable across runs".into())
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<(&str, Option<u64>, Box<dyn Fn() -> Check>)> = vec![
        ("metric oracle equivalence", Some(5), Box::new(metric_oracle)),
        ("classifier fixtures", Some(1), Box::new(classifier)),
        ("feature math", None, Box::new(feature_math)),
        ("normalization", None, Box::new(normalization)),
        ("ltr recovery", Some(30), Box::new(ltr_recovery)),
        ("chronological hygiene", None, Box::new(chronological_hygiene)),
        (
            "end-to-end with mock provider",
            Some(10),
            Box::new(|| end_to_end(dir.path())),
        ),
        ("reformulation contract", None, Box::new(reformulation_contract)),
        ("ablation harness", None, Box::new(ablation_harness)),
    ];
    let mut failed = Vec::new();
    for (name, limit, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(detail), Some(l)) if took > Duration::from_secs(*l) => Err(format!("{detail}; over the {l}s limit")),
            (other, _) => other,
        };
        let limit = limit.map_or("no limit".to_string(), |l| format!("limit {l}s"));
        match &outcome {
            Ok(detail) => println!("PASS  {name:<30} {:>7.3}s ({limit})  {detail}", took.as_secs_f64()),
            Err(why) => {
                println!("FAIL  {name:<30} {:>7.3}s ({limit})  {why}", took.as_secs_f64());
                failed.push(*name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
