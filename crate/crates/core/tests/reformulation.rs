//! The feedback loop: exclusion, cycle budget, and the conversation sent to the provider.

mod common;

use std::sync::{Arc, Mutex};

use faultline_core::corpus::Corpus;
use faultline_core::query::{Conversation, Feedback, LlmProvider, MockProvider, QueryConfig, QueryEngine, Role};
use faultline_core::report::BugReport;
use faultline_core::Error;

fn mini(id: &str) -> BugReport {
    common::mini_reports().into_iter().find(|r| r.report_id == id).unwrap()
}

fn camel() -> Arc<Corpus> {
    common::mini_corpora().get("camel", "1.6").unwrap().clone()
}

#[test]
fn non_existing_class_is_excluded_next_cycle() {
    let engine = common::mini_engine(QueryConfig::default());
    let report = mini("CAMEL-620");
    let corpus = camel();
    let mut d = engine.start(&report, &corpus.index).unwrap();
    assert_eq!(
        d.current().unwrap().entities,
        ["ResequencerType", "ResequencerTest", "createProcessor"]
    );
    let q = engine
        .reformulate(
            &mut d,
            &report,
            &[Feedback::non_existing("ResequencerTest")],
            &corpus.index,
        )
        .unwrap();
    assert_eq!(q.cycle, 1);
    assert!(!q.entities.iter().any(|e| e == "ResequencerTest"));
    assert_eq!(
        q.entities,
        ["ResequencerType", "createStreamResequencer", "StreamResequencer"]
    );
}

#[test]
fn default_budget_allows_exactly_one_reformulation() {
    let engine = common::mini_engine(QueryConfig::default());
    assert_eq!(engine.config().max_cycles, 1);
    let report = mini("CAMEL-2320");
    let corpus = camel();
    let mut d = engine.start(&report, &corpus.index).unwrap();
    let fb = [Feedback::non_buggy("JdbcComponent")];
    let q = engine.reformulate(&mut d, &report, &fb, &corpus.index).unwrap();
    assert_eq!(q.entities, ["JdbcProducer", "setResultSet"]);
    assert!(d.is_exhausted());
    let again = engine.reformulate(&mut d, &report, &[Feedback::non_buggy("JdbcProducer")], &corpus.index);
    assert!(matches!(again, Err(Error::SessionExhausted { max_cycles: 1 })));
    assert_eq!(d.cycle(), 1);
}

#[test]
fn five_cycles_then_exhausted() {
    let classes = [
        "ResequencerType",
        "StreamResequencer",
        "Resequencer",
        "ProcessorType",
        "RouteType",
        "DefaultExchange",
    ];
    let mock = MockProvider::default().with_default(classes.join(" "));
    let engine = QueryEngine::new(
        Arc::new(mock),
        QueryConfig {
            max_cycles: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let report = mini("CAMEL-620");
    let corpus = camel();
    let mut d = engine.start(&report, &corpus.index).unwrap();
    for (i, c) in classes.iter().take(5).enumerate() {
        let q = engine
            .reformulate(&mut d, &report, &[Feedback::non_buggy(*c)], &corpus.index)
            .unwrap();
        assert_eq!(q.cycle as usize, i + 1);
        for gone in &classes[..=i] {
            assert!(!q.entities.iter().any(|e| e == gone), "{gone} in cycle {}", i + 1);
        }
    }
    let sixth = engine.reformulate(
        &mut d,
        &report,
        &[Feedback::non_buggy("DefaultExchange")],
        &corpus.index,
    );
    assert!(matches!(sixth, Err(Error::SessionExhausted { max_cycles: 5 })));
    assert!(QueryEngine::new(
        Arc::new(MockProvider::default()),
        QueryConfig {
            max_cycles: 6,
            ..Default::default()
        }
    )
    .is_err());
}

#[test]
fn malformed_feedback_is_rejected_without_a_cycle() {
    let engine = common::mini_engine(QueryConfig::default());
    let report = mini("CAMEL-620");
    let corpus = camel();
    let mut d = engine.start(&report, &corpus.index).unwrap();
    for bad in [
        vec![],
        vec![Feedback::non_buggy("")],
        vec![Feedback::non_buggy("two words")],
    ] {
        let r = engine.reformulate(&mut d, &report, &bad, &corpus.index);
        assert!(matches!(r, Err(Error::InvalidFeedback(_))), "{bad:?}");
    }
    assert_eq!(d.cycle(), 0);
}

/// Records every conversation it is shown.
struct Recorder {
    inner: MockProvider,
    seen: Mutex<Vec<Conversation>>,
}

impl LlmProvider for Recorder {
    fn name(&self) -> &str {
        "recorder"
    }

    fn complete(&self, conversation: &Conversation) -> faultline_core::Result<String> {
        self.seen.lock().unwrap().push(conversation.clone());
        self.inner.complete(conversation)
    }
}

#[test]
fn feedback_reaches_the_provider_as_user_turns() {
    let rec = Arc::new(Recorder {
        inner: common::mini_mock(),
        seen: Mutex::new(Vec::new()),
    });
    let engine = QueryEngine::new(rec.clone(), QueryConfig::default()).unwrap();
    let report = mini("CAMEL-620");
    let corpus = camel();
    let mut d = engine.start(&report, &corpus.index).unwrap();
    engine
        .reformulate(
            &mut d,
            &report,
            &[Feedback::non_buggy("ResequencerTest")],
            &corpus.index,
        )
        .unwrap();
    let seen = rec.seen.lock().unwrap();
    assert_eq!(seen.len(), 2);
    let second = &seen[1];
    assert_eq!(second.context.cycle, 1);
    assert_eq!(second.context.feedback_classes, ["ResequencerTest"]);
    let n = second.messages.len();
    assert_eq!(second.messages[n - 2].role, Role::Assistant);
    assert_eq!(
        second.messages[n - 2].content,
        "ResequencerType ResequencerTest createProcessor"
    );
    assert_eq!(second.messages[n - 1].role, Role::User);
    assert_eq!(
        second.messages[n - 1].content,
        "ResequencerTest doesn't seem to have the issue."
    );
    assert!(second.messages.starts_with(&seen[0].messages));
}
