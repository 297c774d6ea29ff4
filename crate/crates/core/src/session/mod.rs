//! Interactive reformulation sessions, stored as an append-only event log.

mod manager;
mod store;

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use manager::{ReportPayload, SessionManager};
pub use store::{FileStore, MemoryStore, SessionStore, StoredEvent};

use crate::corpus::FileId;
use crate::ltr::RankedFile;
use crate::query::{Dialogue, Feedback, Query, ShotMode, Turn};
use crate::report::{BugReport, Category};
use crate::{Error, Result};

/// Number of ranked files shown per cycle.
pub const TOP_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    Succeeded,
    Exhausted,
}

impl fmt::Display for SessionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionStatus::Active => "active",
            SessionStatus::Succeeded => "succeeded",
            SessionStatus::Exhausted => "exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        session_id: String,
        project: String,
        version: String,
        report: BugReport,
        category: Category,
        max_cycles: u32,
        shot_mode: ShotMode,
        reply: Option<String>,
        query: Query,
        top: Vec<RankedFile>,
        at: DateTime<Utc>,
    },
    Reformulated {
        feedback: Vec<Feedback>,
        reply: Option<String>,
        query: Query,
        top: Vec<RankedFile>,
        at: DateTime<Utc>,
    },
    Confirmed {
        file_id: FileId,
        at: DateTime<Utc>,
    },
}

/// One cycle: the feedback that led to it (empty for cycle 0), its query and top files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub feedback: Vec<Feedback>,
    pub query: Query,
    pub top: Vec<RankedFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub project: String,
    pub version: String,
    pub report: BugReport,
    pub category: Category,
    pub cycle: u32,
    pub max_cycles: u32,
    pub status: SessionStatus,
    pub history: Vec<CycleRecord>,
    pub confirmed: Option<RankedFile>,
    #[serde(skip)]
    dialogue: Option<Dialogue>,
}

impl Session {
    /// Rebuild a session from its events.
    pub fn replay(events: &[SessionEvent]) -> Result<Session> {
        let mut iter = events.iter();
        let mut session = match iter.next() {
            Some(e @ SessionEvent::Created { .. }) => Session::created(e),
            _ => return Err(Error::Config("event log does not start with a created event".into())),
        };
        for e in iter {
            session.apply(e)?;
        }
        Ok(session)
    }

    fn created(event: &SessionEvent) -> Session {
        let SessionEvent::Created {
            session_id,
            project,
            version,
            report,
            category,
            max_cycles,
            shot_mode,
            reply,
            query,
            top,
            ..
        } = event
        else {
            unreachable!("caller checks the variant")
        };
        let mut dialogue = Dialogue::open(report, *category, *shot_mode, *max_cycles);
        dialogue.record(
            &[],
            Turn {
                reply: reply.clone(),
                query: query.clone(),
            },
        );
        Session {
            session_id: session_id.clone(),
            project: project.clone(),
            version: version.clone(),
            report: report.clone(),
            category: *category,
            cycle: 0,
            max_cycles: *max_cycles,
            status: SessionStatus::Active,
            history: vec![CycleRecord {
                feedback: Vec::new(),
                query: query.clone(),
                top: top.clone(),
            }],
            confirmed: None,
            dialogue: Some(dialogue),
        }
    }

    /// Apply one event. Fails without changing the session if the event is not
    /// allowed in the current state.
    pub fn apply(&mut self, event: &SessionEvent) -> Result<()> {
        match event {
            SessionEvent::Created { .. } => Err(Error::Config("session already created".into())),
            SessionEvent::Reformulated {
                feedback,
                reply,
                query,
                top,
                ..
            } => {
                self.ensure_active()?;
                if self.cycle >= self.max_cycles {
                    return Err(Error::SessionExhausted {
                        max_cycles: self.max_cycles,
                    });
                }
                if let Some(d) = self.dialogue.as_mut() {
                    d.record(
                        feedback,
                        Turn {
                            reply: reply.clone(),
                            query: query.clone(),
                        },
                    );
                }
                self.cycle += 1;
                self.history.push(CycleRecord {
                    feedback: feedback.clone(),
                    query: query.clone(),
                    top: top.clone(),
                });
                if self.cycle >= self.max_cycles {
                    self.status = SessionStatus::Exhausted;
                }
                Ok(())
            }
            SessionEvent::Confirmed { file_id, .. } => {
                self.ensure_active()?;
                let hit = self.top().iter().find(|r| r.file_id == *file_id).cloned();
                let Some(hit) = hit else {
                    return Err(Error::NotInTopTen(file_id.0));
                };
                self.confirmed = Some(hit);
                self.status = SessionStatus::Succeeded;
                Ok(())
            }
        }
    }

    fn ensure_active(&self) -> Result<()> {
        if self.status == SessionStatus::Active {
            Ok(())
        } else {
            Err(Error::SessionClosed {
                id: self.session_id.clone(),
                status: self.status.to_string(),
            })
        }
    }

    pub fn current_query(&self) -> &Query {
        &self.history.last().expect("history is never empty").query
    }

    /// Top files of the latest cycle.
    pub fn top(&self) -> &[RankedFile] {
        &self.history.last().expect("history is never empty").top
    }

    pub fn dialogue(&self) -> Option<&Dialogue> {
        self.dialogue.as_ref()
    }
}
