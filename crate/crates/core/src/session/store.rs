//! Session event persistence.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use log::warn;
use serde::{Deserialize, Serialize};

use super::SessionEvent;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredEvent {
    pub session_id: String,
    pub event: SessionEvent,
}

pub trait SessionStore: Send + Sync {
    fn append(&self, session_id: &str, event: &SessionEvent) -> Result<()>;

    /// Every stored event in append order.
    fn load(&self) -> Result<Vec<StoredEvent>>;
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    events: Mutex<Vec<StoredEvent>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SessionStore for MemoryStore {
    fn append(&self, session_id: &str, event: &SessionEvent) -> Result<()> {
        self.events.lock().expect("store lock").push(StoredEvent {
            session_id: session_id.to_string(),
            event: event.clone(),
        });
        Ok(())
    }

    fn load(&self) -> Result<Vec<StoredEvent>> {
        Ok(self.events.lock().expect("store lock").clone())
    }
}

/// JSON-lines event log, one [`StoredEvent`] per line, fsynced on append.
#[derive(Debug)]
pub struct FileStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl FileStore {
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(FileStore {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl SessionStore for FileStore {
    fn append(&self, session_id: &str, event: &SessionEvent) -> Result<()> {
        let line = serde_json::to_string(&StoredEvent {
            session_id: session_id.to_string(),
            event: event.clone(),
        })
        .map_err(|e| Error::json("session event", e))?;
        let mut file = self.file.lock().expect("store lock");
        writeln!(file, "{line}").map_err(|e| Error::io(&self.path, e))?;
        file.sync_data().map_err(|e| Error::io(&self.path, e))
    }

    fn load(&self) -> Result<Vec<StoredEvent>> {
        let file = File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&self.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line) {
                Ok(e) => out.push(e),
                // a torn last write after a crash
                Err(e) => warn!("{}:{}: skipping unreadable event: {e}", self.path.display(), i + 1),
            }
        }
        Ok(out)
    }
}
