//! In-process session store with optional snapshot persistence.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use itinera_core::canonical;
use itinera_core::dialogue::DialogueSession;
use serde::{Deserialize, Serialize};

pub type SessionHandle = Arc<Mutex<DialogueSession>>;

#[derive(Debug)]
pub enum CreateError {
    BadId(String),
    Taken(String),
}

#[derive(Default)]
struct Inner {
    next: u64,
    sessions: BTreeMap<String, SessionHandle>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    next: u64,
    sessions: Vec<DialogueSession>,
}

/// Sessions by id. Each session has its own lock so turns on one session are
/// serialized while different sessions proceed independently. Lock order is
/// always map first, then session.
#[derive(Default)]
pub struct SessionStore {
    inner: Mutex<Inner>,
    snapshot: Option<PathBuf>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Store persisted to `path`. An existing snapshot is loaded.
    pub fn with_snapshot(path: impl Into<PathBuf>) -> io::Result<Self> {
        let path = path.into();
        let mut inner = Inner::default();
        if path.exists() {
            let snap: Snapshot = serde_json::from_slice(&fs::read(&path)?)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            inner.next = snap.next;
            for s in snap.sessions {
                inner.sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
            }
        }
        Ok(SessionStore { inner: Mutex::new(inner), snapshot: Some(path) })
    }

    pub fn snapshot_path(&self) -> Option<&Path> {
        self.snapshot.as_deref()
    }

    pub fn len(&self) -> usize {
        lock(&self.inner).sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<String> {
        lock(&self.inner).sessions.keys().cloned().collect()
    }

    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        lock(&self.inner).sessions.get(id).cloned()
    }

    /// Reserve an id and insert an empty session under it. Automatic ids are
    /// `s0001`, `s0002`, ... skipping any already taken.
    pub fn create(&self, id: Option<String>) -> Result<SessionHandle, CreateError> {
        let mut inner = lock(&self.inner);
        let id = match id {
            Some(id) if !valid_id(&id) => return Err(CreateError::BadId(id)),
            Some(id) if inner.sessions.contains_key(&id) => return Err(CreateError::Taken(id)),
            Some(id) => id,
            None => loop {
                inner.next += 1;
                let id = format!("s{:04}", inner.next);
                if !inner.sessions.contains_key(&id) {
                    break id;
                }
            },
        };
        let handle = Arc::new(Mutex::new(DialogueSession::new(id.clone())));
        inner.sessions.insert(id, handle.clone());
        Ok(handle)
    }

    pub fn remove(&self, id: &str) {
        lock(&self.inner).sessions.remove(id);
    }

    /// Write the snapshot, if one is configured. Written to a sibling
    /// temporary file and renamed into place.
    pub fn persist(&self) -> io::Result<()> {
        let Some(path) = &self.snapshot else { return Ok(()) };
        let inner = lock(&self.inner);
        let sessions = inner.sessions.values().map(|h| lock(h).clone()).collect();
        let bytes = canonical::to_pretty(&Snapshot { next: inner.next, sessions });
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, path)
    }
}

pub fn lock_session(handle: &SessionHandle) -> MutexGuard<'_, DialogueSession> {
    lock(handle)
}
