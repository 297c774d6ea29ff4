//! Session lifecycle on top of shared corpora, model and query engine.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex, RwLock, TryLockError};

use chrono::Utc;
use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::{Session, SessionEvent, SessionStatus, SessionStore, TOP_N};
use crate::corpus::{Corpus, CorpusSet, FileId};
use crate::exec::Execution;
use crate::features::{extract_all, HistoryIndex};
use crate::ltr::{rank, Candidate, RankedFile, RankingModel};
use crate::query::{Dialogue, Feedback, Query, QueryEngine, MAX_CYCLES_CAP};
use crate::report::{classify, parse_timestamp, BugReport, Category};
use crate::{Error, Result};

/// A report as submitted to the service. Ground truth and timestamps are optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportPayload {
    #[serde(default)]
    pub report_id: Option<String>,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub created_at: Option<String>,
    #[serde(default)]
    pub fixed_files: BTreeSet<String>,
    /// Reformulation budget for this session; the manager default when absent.
    #[serde(default)]
    pub max_cycles: Option<u32>,
}

impl ReportPayload {
    fn into_report(self, project: &str, version: &str, fallback_id: &str) -> Result<BugReport> {
        let id = self
            .report_id
            .filter(|s| !s.trim().is_empty())
            .unwrap_or_else(|| fallback_id.to_string());
        if self.title.trim().is_empty() && self.description.trim().is_empty() {
            return Err(Error::InvalidReport {
                id,
                reason: "title and description are both empty".into(),
            });
        }
        let created_at = match self.created_at.as_deref() {
            Some(s) => parse_timestamp(s)?,
            None => Utc::now(),
        };
        Ok(BugReport {
            report_id: id,
            project: project.to_string(),
            version: version.to_string(),
            title: self.title,
            description: self.description,
            created_at,
            fixed_files: self.fixed_files,
        })
    }
}

pub struct SessionManager {
    corpora: CorpusSet,
    model: RankingModel,
    engine: QueryEngine,
    history: HistoryIndex,
    store: Box<dyn SessionStore>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
}

impl SessionManager {
    /// Build the manager and restore every session found in `store`.
    pub fn new(
        corpora: CorpusSet,
        model: RankingModel,
        engine: QueryEngine,
        history: HistoryIndex,
        store: Box<dyn SessionStore>,
    ) -> Result<Self> {
        let mut grouped: BTreeMap<String, Vec<SessionEvent>> = BTreeMap::new();
        for e in store.load()? {
            grouped.entry(e.session_id).or_default().push(e.event);
        }
        let mut sessions = BTreeMap::new();
        for (id, events) in grouped {
            match Session::replay(&events) {
                Ok(s) => {
                    sessions.insert(id, Arc::new(Mutex::new(s)));
                }
                Err(e) => warn!("session {id}: cannot replay: {e}"),
            }
        }
        if !sessions.is_empty() {
            info!("restored {} session(s)", sessions.len());
        }
        Ok(SessionManager {
            corpora,
            model,
            engine,
            history,
            store,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn corpora(&self) -> &CorpusSet {
        &self.corpora
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("sessions lock").len()
    }

    fn corpus(&self, project: &str, version: &str) -> Result<&Arc<Corpus>> {
        self.corpora.get(project, version).ok_or_else(|| Error::UnknownCorpus {
            project: project.into(),
            version: version.into(),
        })
    }

    fn top(&self, report: &BugReport, category: Category, query: &Query, corpus: &Corpus) -> Result<Vec<RankedFile>> {
        let model = self.model.category(category)?;
        let features = extract_all(report, &query.entities, corpus, &self.history, Execution::default());
        let candidates: Vec<Candidate<'_>> = corpus
            .files
            .iter()
            .zip(&features)
            .map(|(f, v)| Candidate {
                file_id: f.file_id,
                path: &f.path,
                features: v,
            })
            .collect();
        let mut ranked = rank(model, &candidates);
        ranked.truncate(TOP_N);
        Ok(ranked)
    }

    pub fn create(&self, project: &str, version: &str, payload: ReportPayload) -> Result<Session> {
        let corpus = self.corpus(project, version)?;
        let session_id = uuid::Uuid::new_v4().to_string();
        let max_cycles = payload.max_cycles.unwrap_or(self.engine.config().max_cycles);
        if max_cycles > MAX_CYCLES_CAP {
            return Err(Error::Config(format!(
                "max_cycles {max_cycles} exceeds the cap of {MAX_CYCLES_CAP}"
            )));
        }
        let report = payload.into_report(project, version, &session_id)?;
        let category = classify(&report);
        let shot_mode = self.engine.config().shot_mode;
        let dialogue = Dialogue::open(&report, category, shot_mode, max_cycles);
        let turn = self.engine.initial_turn(&dialogue, &report, &corpus.index)?;
        let top = self.top(&report, category, &turn.query, corpus)?;
        let event = SessionEvent::Created {
            session_id: session_id.clone(),
            project: project.into(),
            version: version.into(),
            report,
            category,
            max_cycles,
            shot_mode,
            reply: turn.reply,
            query: turn.query,
            top,
            at: Utc::now(),
        };
        let session = Session::replay(std::slice::from_ref(&event))?;
        self.store.append(&session_id, &event)?;
        self.sessions
            .write()
            .expect("sessions lock")
            .insert(session_id, Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::SessionNotFound(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Session> {
        let handle = self.handle(id)?;
        let guard = handle.lock().expect("session lock");
        Ok(guard.clone())
    }

    /// Run `f` on the session if no other request holds it; otherwise `SessionBusy`.
    fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        let handle = self.handle(id)?;
        let mut guard = match handle.try_lock() {
            Ok(g) => g,
            Err(TryLockError::WouldBlock) => return Err(Error::SessionBusy(id.to_string())),
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        f(&mut guard)
    }

    /// Validate, persist, then apply.
    fn commit(&self, session: &mut Session, event: SessionEvent) -> Result<Session> {
        let mut next = session.clone();
        next.apply(&event)?;
        self.store.append(&session.session_id, &event)?;
        *session = next;
        Ok(session.clone())
    }

    pub fn feedback(&self, id: &str, feedback: Vec<Feedback>) -> Result<Session> {
        self.with_session(id, |session| {
            if session.status != SessionStatus::Active {
                return Err(Error::SessionClosed {
                    id: id.to_string(),
                    status: session.status.to_string(),
                });
            }
            let corpus = self.corpus(&session.project, &session.version)?.clone();
            let dialogue = session
                .dialogue()
                .ok_or_else(|| Error::Config("session has no dialogue".into()))?;
            let turn = self
                .engine
                .reformulation_turn(dialogue, &session.report, &feedback, &corpus.index)?;
            let top = self.top(&session.report, session.category, &turn.query, &corpus)?;
            let event = SessionEvent::Reformulated {
                feedback,
                reply: turn.reply,
                query: turn.query,
                top,
                at: Utc::now(),
            };
            self.commit(session, event)
        })
    }

    pub fn confirm(&self, id: &str, file_id: FileId) -> Result<Session> {
        self.with_session(id, |session| {
            self.commit(
                session,
                SessionEvent::Confirmed {
                    file_id,
                    at: Utc::now(),
                },
            )
        })
    }

    /// Events of one session, in order.
    pub fn events(&self, id: &str) -> Result<Vec<SessionEvent>> {
        self.handle(id)?;
        Ok(self
            .store
            .load()?
            .into_iter()
            .filter(|e| e.session_id == id)
            .map(|e| e.event)
            .collect())
    }
}
