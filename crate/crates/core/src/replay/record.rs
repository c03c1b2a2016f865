use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::client::{
    Credentials, HttpRequest, HttpResponse, HttpTransport, Transport, TransportError,
};

use super::{write_entry, write_index, FixtureEntry};

const REDACTED: &str = "[REDACTED]";

/// Forwards requests to an upstream transport and persists every response,
/// error statuses included. The index is rewritten after each entry so an
/// interrupted crawl still leaves a loadable fixture set.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
    secrets: Vec<String>,
    state: Mutex<RecordState>,
}

#[derive(Default)]
struct RecordState {
    counters: HashMap<String, u32>,
    entries: Vec<FixtureEntry>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Result<Self, TransportError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| TransportError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self {
            inner,
            dir,
            secrets: Vec::new(),
            state: Mutex::new(RecordState::default()),
        })
    }

    /// Adds a value that must never reach disk.
    pub fn with_secret(mut self, secret: impl Into<String>) -> Self {
        let secret = secret.into();
        if !secret.is_empty() {
            self.secrets.push(secret);
        }
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entries(&self) -> Vec<FixtureEntry> {
        self.state.lock().unwrap().entries.clone()
    }

    fn redact(&self, text: &str, extra: &[&str]) -> String {
        let mut out = text.to_string();
        for s in self.secrets.iter().map(String::as_str).chain(extra.iter().copied()) {
            if !s.is_empty() {
                out = out.replace(s, REDACTED);
            }
        }
        out
    }
}

/// The credential inside an `Authorization` header value, minus its scheme.
fn header_secrets(req: &HttpRequest) -> Vec<&str> {
    req.headers
        .iter()
        .filter(|(k, _)| k.eq_ignore_ascii_case("authorization"))
        .flat_map(|(_, v)| {
            let bare = v.split_once(' ').map(|(_, t)| t).unwrap_or(v);
            [v.as_str(), bare]
        })
        .collect()
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let resp = self.inner.send(req)?;
        let secrets = header_secrets(req);
        let key = self.redact(&req.key(), &secrets);
        let mut entry = FixtureEntry::new(&key, 0, &resp);
        for value in entry.headers.values_mut() {
            *value = self.redact(value, &secrets);
        }
        let mut state = self.state.lock().unwrap();
        let seq = state.counters.entry(key).or_default();
        entry.sequence_index = *seq;
        *seq += 1;
        write_entry(&self.dir, &entry)?;
        state.entries.push(entry);
        write_index(&self.dir, &state.entries)?;
        Ok(resp)
    }
}

/// A recorder in front of the live API at `base_url`, writing fixtures to
/// `out_dir`. The token in `creds` is registered for redaction.
pub fn record(
    base_url: &str,
    out_dir: impl Into<PathBuf>,
    creds: &Credentials,
) -> Result<RecordingTransport<HttpTransport>, TransportError> {
    let mut rec = RecordingTransport::new(HttpTransport::new(base_url)?, out_dir)?;
    if let Some(token) = &creds.token {
        rec = rec.with_secret(token.expose());
    }
    Ok(rec)
}
