//! Query construction and feedback-driven reformulation.

use std::collections::BTreeSet;
use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use super::prompt::{build_prompt, Message, ShotMode};
use super::provider::{Conversation, ConversationContext, LlmProvider};
use super::reply::parse_llm_reply;
use crate::corpus::{is_identifier, tokenize, CorpusIndex};
use crate::report::{classify, detect_program_entities, BugReport, Category};
use crate::{Error, Result};

/// Upper bound on reformulation cycles in one session.
pub const MAX_CYCLES_CAP: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Reduction,
    Expansion,
    Reformulation,
}

impl Provenance {
    pub fn initial(category: Category) -> Self {
        match category {
            Category::PE | Category::ST => Provenance::Reduction,
            Category::NL => Provenance::Expansion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub entities: Vec<String>,
    pub category: Category,
    pub cycle: u32,
    pub provenance: Provenance,
    /// Set when the entities come from a local fallback instead of the provider.
    #[serde(default)]
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    NonExistingClass,
    NonBuggyClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub kind: FeedbackKind,
    pub class_name: String,
}

impl Feedback {
    pub fn non_existing(class_name: impl Into<String>) -> Self {
        Feedback {
            kind: FeedbackKind::NonExistingClass,
            class_name: class_name.into(),
        }
    }

    pub fn non_buggy(class_name: impl Into<String>) -> Self {
        Feedback {
            kind: FeedbackKind::NonBuggyClass,
            class_name: class_name.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if is_identifier(&self.class_name) {
            Ok(())
        } else {
            Err(Error::InvalidFeedback(format!(
                "{:?} is not a class identifier",
                self.class_name
            )))
        }
    }

    /// The user turn sent to the provider for this feedback.
    pub fn message(&self) -> String {
        match self.kind {
            FeedbackKind::NonExistingClass => {
                format!(
                    "I couldn't find any class named {} in the source code.",
                    self.class_name
                )
            }
            FeedbackKind::NonBuggyClass => format!("{} doesn't seem to have the issue.", self.class_name),
        }
    }
}

/// What to do when the provider keeps failing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderFailurePolicy {
    /// Use the local fallback query and flag it.
    #[default]
    Fallback,
    /// Surface the provider error to the caller.
    Propagate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryConfig {
    pub shot_mode: ShotMode,
    pub max_cycles: u32,
    /// Extra attempts after an unparseable reply or retriable provider error.
    pub reply_retries: u32,
    pub on_provider_failure: ProviderFailurePolicy,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            shot_mode: ShotMode::OneShot,
            max_cycles: 1,
            reply_retries: 2,
            on_provider_failure: ProviderFailurePolicy::Fallback,
        }
    }
}

impl QueryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_cycles > MAX_CYCLES_CAP {
            return Err(Error::Config(format!(
                "max_cycles {} exceeds the cap of {MAX_CYCLES_CAP}",
                self.max_cycles
            )));
        }
        Ok(())
    }
}

/// Drop expansion entities the corpus does not know. Other provenances pass through.
pub fn validate_entities(query: Query, index: &CorpusIndex) -> Result<Query> {
    if query.provenance != Provenance::Expansion {
        return Ok(query);
    }
    let entities = prune_unknown(query.entities, index);
    if entities.is_empty() {
        return Err(Error::EmptyQueryAfterValidation);
    }
    Ok(Query { entities, ..query })
}

fn prune_unknown(entities: Vec<String>, index: &CorpusIndex) -> Vec<String> {
    entities
        .into_iter()
        .filter(|e| {
            index.is_declared_class(e) || index.is_declared_method(e) || index.contains_token(&e.to_lowercase())
        })
        .collect()
}

/// The outcome of one provider exchange: the raw reply (if any) and the query derived from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub reply: Option<String>,
    pub query: Query,
}

/// The running conversation behind one report's query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialogue {
    pub report_id: String,
    pub category: Category,
    pub max_cycles: u32,
    pub messages: Vec<Message>,
    /// Classes named in any feedback so far; never returned again.
    pub excluded: BTreeSet<String>,
    pub queries: Vec<Query>,
}

impl Dialogue {
    /// A dialogue holding only the initial prompt.
    pub fn open(report: &BugReport, category: Category, shot_mode: ShotMode, max_cycles: u32) -> Self {
        Dialogue {
            report_id: report.report_id.clone(),
            category,
            max_cycles,
            messages: build_prompt(report, category, shot_mode),
            excluded: BTreeSet::new(),
            queries: Vec::new(),
        }
    }

    /// Cycle of the latest query; 0 before and right after the initial query.
    pub fn cycle(&self) -> u32 {
        self.queries.len().saturating_sub(1) as u32
    }

    pub fn current(&self) -> Option<&Query> {
        self.queries.last()
    }

    pub fn is_exhausted(&self) -> bool {
        self.cycle() >= self.max_cycles
    }

    fn next_cycle(&self) -> u32 {
        self.queries.len() as u32
    }

    /// The conversation the provider sees if `feedback` is sent next.
    pub fn preview(&self, feedback: &[Feedback]) -> Conversation {
        let mut messages = self.messages.clone();
        messages.extend(feedback.iter().map(|f| Message::user(f.message())));
        let mut classes = self.excluded.clone();
        classes.extend(feedback.iter().map(|f| f.class_name.clone()));
        Conversation {
            messages,
            context: ConversationContext {
                report_id: self.report_id.clone(),
                cycle: self.next_cycle(),
                feedback_classes: classes.into_iter().collect(),
            },
        }
    }

    /// Append a completed exchange. Replaying the same turns rebuilds the same dialogue.
    pub fn record(&mut self, feedback: &[Feedback], turn: Turn) {
        for f in feedback {
            self.messages.push(Message::user(f.message()));
            self.excluded.insert(f.class_name.clone());
        }
        if let Some(reply) = &turn.reply {
            self.messages.push(Message::assistant(reply));
        }
        self.queries.push(turn.query);
    }

    fn is_excluded(&self, entity: &str, feedback: &[Feedback]) -> bool {
        self.excluded.iter().any(|x| x.eq_ignore_ascii_case(entity))
            || feedback.iter().any(|f| f.class_name.eq_ignore_ascii_case(entity))
    }
}

pub struct QueryEngine {
    provider: Arc<dyn LlmProvider>,
    config: QueryConfig,
}

impl QueryEngine {
    pub fn new(provider: Arc<dyn LlmProvider>, config: QueryConfig) -> Result<Self> {
        config.validate()?;
        Ok(QueryEngine { provider, config })
    }

    pub fn config(&self) -> &QueryConfig {
        &self.config
    }

    pub fn provider(&self) -> &Arc<dyn LlmProvider> {
        &self.provider
    }

    /// Classify the report and run the initial exchange (cycle 0).
    pub fn start(&self, report: &BugReport, index: &CorpusIndex) -> Result<Dialogue> {
        let mut dialogue = Dialogue::open(report, classify(report), self.config.shot_mode, self.config.max_cycles);
        let turn = self.exchange(&dialogue, report, &[], index)?;
        dialogue.record(&[], turn);
        Ok(dialogue)
    }

    /// The initial exchange for an opened, empty dialogue, without recording it.
    pub fn initial_turn(&self, dialogue: &Dialogue, report: &BugReport, index: &CorpusIndex) -> Result<Turn> {
        if !dialogue.queries.is_empty() {
            return Err(Error::Config("dialogue already has an initial query".into()));
        }
        self.exchange(dialogue, report, &[], index)
    }

    /// The initial query for a report.
    pub fn construct_query(&self, report: &BugReport, index: &CorpusIndex) -> Result<Query> {
        let dialogue = self.start(report, index)?;
        Ok(dialogue.queries.into_iter().next().expect("start records one query"))
    }

    /// Send feedback and derive the next query. Every class named in feedback
    /// during the dialogue is excluded from the result.
    pub fn reformulate(
        &self,
        dialogue: &mut Dialogue,
        report: &BugReport,
        feedback: &[Feedback],
        index: &CorpusIndex,
    ) -> Result<Query> {
        let turn = self.reformulation_turn(dialogue, report, feedback, index)?;
        let query = turn.query.clone();
        dialogue.record(feedback, turn);
        Ok(query)
    }

    /// Like [`reformulate`](Self::reformulate) without mutating the dialogue.
    pub fn reformulation_turn(
        &self,
        dialogue: &Dialogue,
        report: &BugReport,
        feedback: &[Feedback],
        index: &CorpusIndex,
    ) -> Result<Turn> {
        if dialogue.queries.is_empty() {
            return Err(Error::Config("dialogue has no initial query".into()));
        }
        if dialogue.is_exhausted() {
            return Err(Error::SessionExhausted {
                max_cycles: dialogue.max_cycles,
            });
        }
        if feedback.is_empty() {
            return Err(Error::InvalidFeedback("at least one feedback item is required".into()));
        }
        for f in feedback {
            f.validate()?;
        }
        self.exchange(dialogue, report, feedback, index)
    }

    fn exchange(
        &self,
        dialogue: &Dialogue,
        report: &BugReport,
        feedback: &[Feedback],
        index: &CorpusIndex,
    ) -> Result<Turn> {
        let conversation = dialogue.preview(feedback);
        let attempts = 1 + self.config.reply_retries;
        let mut last_reply = None;
        let mut last_error = None;
        for _ in 0..attempts {
            match self.provider.complete(&conversation) {
                Ok(text) => match parse_llm_reply(&text, Some(index)) {
                    Ok(entities) => {
                        if let Some(query) = self.derive(dialogue, report, feedback, entities, index) {
                            return Ok(Turn {
                                reply: Some(text),
                                query,
                            });
                        }
                        last_reply = Some(text);
                        last_error = Some(Error::EmptyQueryAfterValidation);
                        break;
                    }
                    Err(e) => {
                        last_reply = Some(text);
                        last_error = Some(e);
                    }
                },
                Err(e) => {
                    let retriable = e.is_retriable();
                    last_error = Some(e);
                    if !retriable {
                        break;
                    }
                }
            }
        }
        match last_error {
            Some(e @ Error::Provider { .. }) if self.config.on_provider_failure == ProviderFailurePolicy::Propagate => {
                Err(e)
            }
            e => {
                if let Some(e) = e {
                    warn!("report {}: {e}; using fallback query", report.report_id);
                }
                Ok(Turn {
                    reply: last_reply,
                    query: self.fallback(dialogue, report, feedback),
                })
            }
        }
    }

    /// Apply exclusions and, for expansion lineage, corpus validation.
    fn derive(
        &self,
        dialogue: &Dialogue,
        report: &BugReport,
        feedback: &[Feedback],
        entities: Vec<String>,
        index: &CorpusIndex,
    ) -> Option<Query> {
        let _ = report;
        let cycle = dialogue.next_cycle();
        let entities: Vec<String> = entities
            .into_iter()
            .filter(|e| !dialogue.is_excluded(e, feedback))
            .collect();
        let provenance = if cycle == 0 {
            Provenance::initial(dialogue.category)
        } else {
            Provenance::Reformulation
        };
        let entities = if dialogue.category == Category::NL {
            prune_unknown(entities, index)
        } else {
            entities
        };
        if entities.is_empty() {
            return None;
        }
        Some(Query {
            entities,
            category: dialogue.category,
            cycle,
            provenance,
            fallback: false,
        })
    }

    fn fallback(&self, dialogue: &Dialogue, report: &BugReport, feedback: &[Feedback]) -> Query {
        let cycle = dialogue.next_cycle();
        let keep = |e: &String| !dialogue.is_excluded(e, feedback);
        let mut entities: Vec<String> = dialogue
            .current()
            .map(|q| q.entities.iter().filter(|e| keep(e)).cloned().collect())
            .unwrap_or_default();
        if entities.is_empty() {
            entities = fallback_entities(report, dialogue.category)
                .into_iter()
                .filter(keep)
                .collect();
        }
        let provenance = if cycle == 0 {
            Provenance::initial(dialogue.category)
        } else {
            Provenance::Reformulation
        };
        Query {
            entities,
            category: dialogue.category,
            cycle,
            provenance,
            fallback: true,
        }
    }
}

/// Local stand-in query: detected entities for PE/ST, title tokens for NL
/// (and for PE/ST reports whose entities are not identifiers).
pub fn fallback_entities(report: &BugReport, category: Category) -> Vec<String> {
    fn push(out: &mut Vec<String>, e: String) {
        if is_identifier(&e) && e.len() >= 2 && !out.contains(&e) {
            out.push(e);
        }
    }
    let mut out: Vec<String> = Vec::new();
    if category != Category::NL {
        for e in detect_program_entities(&report.text()) {
            push(&mut out, e.strip_suffix(".java").map(str::to_string).unwrap_or(e));
        }
    }
    if out.is_empty() {
        for t in tokenize(&report.title) {
            push(&mut out, t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::query::MockProvider;
    use crate::query::Role;

    fn corpus() -> Corpus {
        Corpus::from_sources(
            "camel",
            "1.6",
            &[
                (
                    "a/Resequencer.java",
                    "public class Resequencer { public void process(Exchange e) {} }",
                ),
                (
                    "a/StreamResequencer.java",
                    "public class StreamResequencer { void sendMessage() {} }",
                ),
                (
                    "a/ResequencerType.java",
                    "public class ResequencerType { Resequencer r; }",
                ),
                (
                    "a/JdbcProducer.java",
                    "public class JdbcProducer { void process() { query(); } }",
                ),
            ],
        )
        .unwrap()
    }

    fn report(id: &str, title: &str, description: &str) -> BugReport {
        BugReport {
            report_id: id.into(),
            project: "camel".into(),
            version: "1.6".into(),
            title: title.into(),
            description: description.into(),
            created_at: crate::report::parse_timestamp("2009-01-01").unwrap(),
            fixed_files: Default::default(),
        }
    }

    fn engine(mock: MockProvider, config: QueryConfig) -> QueryEngine {
        QueryEngine::new(Arc::new(mock), config).unwrap()
    }

    #[test]
    fn nl_expansion_is_pruned_to_corpus_terms() {
        let c = corpus();
        let r = report(
            "C-1",
            "messages arrive out of order",
            "ordering is broken when batching",
        );
        let mock = MockProvider::new(Default::default()).script(
            "C-1",
            0,
            &[],
            "Resequencer, StreamResequencer, KafkaConsumer",
        );
        let q = engine(mock, QueryConfig::default())
            .construct_query(&r, &c.index)
            .unwrap();
        assert_eq!(q.category, Category::NL);
        assert_eq!(q.provenance, Provenance::Expansion);
        assert_eq!(q.entities, vec!["Resequencer", "StreamResequencer"]);
        assert!(!q.fallback);
    }

    #[test]
    fn reformulation_excludes_feedback_classes() {
        let c = corpus();
        let r = report("C-2", "messages arrive out of order", "ordering is broken");
        let mock = MockProvider::new(Default::default())
            .script("C-2", 0, &[], "Resequencer, StreamResequencer")
            .script("C-2", 1, &["Resequencer"], "Resequencer, ResequencerType");
        let mut config = QueryConfig::default();
        config.max_cycles = 2;
        let e = engine(mock, config);
        let mut d = e.start(&r, &c.index).unwrap();
        let q = e
            .reformulate(&mut d, &r, &[Feedback::non_buggy("Resequencer")], &c.index)
            .unwrap();
        assert_eq!(q.entities, vec!["ResequencerType"]);
        assert_eq!(q.cycle, 1);
        assert_eq!(q.provenance, Provenance::Reformulation);
        let last_user = d.messages.iter().rev().find(|m| m.role == Role::User).unwrap();
        assert_eq!(last_user.content, "Resequencer doesn't seem to have the issue.");
    }

    #[test]
    fn cycles_are_bounded() {
        let c = corpus();
        let r = report("C-3", "JdbcProducer fails", "calling process() twice");
        let mock = MockProvider::new(Default::default()).with_default("JdbcProducer, process");
        let e = engine(mock, QueryConfig::default());
        let mut d = e.start(&r, &c.index).unwrap();
        e.reformulate(&mut d, &r, &[Feedback::non_existing("Foo")], &c.index)
            .unwrap();
        let err = e
            .reformulate(&mut d, &r, &[Feedback::non_existing("Bar")], &c.index)
            .unwrap_err();
        assert!(matches!(err, Error::SessionExhausted { max_cycles: 1 }));
        let bad = QueryConfig {
            max_cycles: 6,
            ..QueryConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn provider_failure_falls_back_or_propagates() {
        let c = corpus();
        let r = report("C-4", "NPE in JdbcProducer.process()", "");
        let e = engine(MockProvider::new(Default::default()), QueryConfig::default());
        let q = e.construct_query(&r, &c.index).unwrap();
        assert!(q.fallback);
        assert_eq!(q.entities, vec!["JdbcProducer", "process"]);
        let strict = QueryConfig {
            on_provider_failure: ProviderFailurePolicy::Propagate,
            ..QueryConfig::default()
        };
        let e = engine(MockProvider::new(Default::default()), strict);
        assert!(matches!(e.construct_query(&r, &c.index), Err(Error::Provider { .. })));
    }

    #[test]
    fn invalid_feedback_is_rejected() {
        let c = corpus();
        let r = report("C-5", "JdbcProducer fails", "");
        let mut config = QueryConfig::default();
        config.max_cycles = 3;
        let e = engine(
            MockProvider::new(Default::default()).with_default("JdbcProducer"),
            config,
        );
        let mut d = e.start(&r, &c.index).unwrap();
        assert!(e.reformulate(&mut d, &r, &[], &c.index).is_err());
        assert!(e
            .reformulate(&mut d, &r, &[Feedback::non_buggy("not a class")], &c.index)
            .is_err());
        assert_eq!(d.cycle(), 0);
    }

    #[test]
    fn dialogue_replays_from_turns() {
        let c = corpus();
        let r = report("C-6", "messages out of order", "");
        let mut config = QueryConfig::default();
        config.max_cycles = 2;
        let e = engine(
            MockProvider::new(Default::default()).with_default("Resequencer, ResequencerType"),
            config,
        );
        let mut d = e.start(&r, &c.index).unwrap();
        let fb = [Feedback::non_buggy("Resequencer")];
        e.reformulate(&mut d, &r, &fb, &c.index).unwrap();

        let mut replay = Dialogue::open(&r, d.category, ShotMode::OneShot, 2);
        replay.record(
            &[],
            Turn {
                reply: Some("Resequencer, ResequencerType".into()),
                query: d.queries[0].clone(),
            },
        );
        replay.record(
            &fb,
            Turn {
                reply: Some("Resequencer, ResequencerType".into()),
                query: d.queries[1].clone(),
            },
        );
        assert_eq!(replay, d);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<Dialogue>(&json).unwrap(), d);
    }

    #[test]
    fn validate_entities_only_touches_expansion() {
        let c = corpus();
        let q = Query {
            entities: vec!["Nope".into()],
            category: Category::PE,
            cycle: 0,
            provenance: Provenance::Reduction,
            fallback: false,
        };
        assert_eq!(validate_entities(q.clone(), &c.index).unwrap(), q);
        let q = Query {
            provenance: Provenance::Expansion,
            ..q
        };
        assert!(matches!(
            validate_entities(q, &c.index),
            Err(Error::EmptyQueryAfterValidation)
        ));
    }
}
