//! Record/replay of API traffic for offline, deterministic runs.
//!
//! A fixture set is a flat directory: one JSON document per recorded
//! response plus an `index.json` listing every entry. Entries are keyed by
//! the canonical request line (`GET /path?sorted=query`) and a per-key
//! sequence index, so a request issued twice replays its two recorded
//! answers in order.

mod record;
pub mod sets;
pub mod synthetic;

pub use record::{record, RecordingTransport};

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tracing::warn;

use crate::client::{HttpRequest, HttpResponse, Transport, TransportError};

pub const INDEX_FILE: &str = "index.json";

/// Response headers worth keeping: pagination and rate-limit metadata.
pub fn is_recorded_header(name: &str) -> bool {
    let name = name.to_ascii_lowercase();
    name == "link" || name == "retry-after" || name.starts_with("x-ratelimit-")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub request_key: String,
    pub sequence_index: u32,
    pub status: u16,
    pub headers: BTreeMap<String, String>,
    pub body_b64: String,
}

impl FixtureEntry {
    pub fn new(request_key: impl Into<String>, sequence_index: u32, resp: &HttpResponse) -> Self {
        Self {
            request_key: request_key.into(),
            sequence_index,
            status: resp.status,
            headers: resp
                .headers
                .iter()
                .filter(|(k, _)| is_recorded_header(k))
                .map(|(k, v)| (k.to_ascii_lowercase(), v.clone()))
                .collect(),
            body_b64: B64.encode(&resp.body),
        }
    }

    pub fn body(&self) -> Result<Vec<u8>, TransportError> {
        B64.decode(&self.body_b64).map_err(|e| TransportError::FixtureCorrupt {
            path: self.file_name(),
            message: format!("body_b64: {e}"),
        })
    }

    pub fn to_response(&self) -> Result<HttpResponse, TransportError> {
        Ok(HttpResponse {
            status: self.status,
            headers: self.headers.clone(),
            body: self.body()?,
        })
    }

    /// `<first 16 hex digits of sha256(request_key)>-<sequence>.json`
    pub fn file_name(&self) -> String {
        fixture_file_name(&self.request_key, self.sequence_index)
    }
}

pub fn fixture_file_name(request_key: &str, sequence_index: u32) -> String {
    let digest = Sha256::digest(request_key.as_bytes());
    format!("{}-{:04}.json", &hex::encode(digest)[..16], sequence_index)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub file: String,
    pub request_key: String,
    pub sequence_index: u32,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> TransportError {
    TransportError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn corrupt(path: &Path, e: impl std::fmt::Display) -> TransportError {
    TransportError::FixtureCorrupt {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn write_entry(dir: &Path, entry: &FixtureEntry) -> Result<PathBuf, TransportError> {
    let path = dir.join(entry.file_name());
    let mut json = serde_json::to_string_pretty(entry).map_err(|e| io_err(&path, e))?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Writes `index.json`, sorted by (request_key, sequence_index).
pub fn write_index(dir: &Path, entries: &[FixtureEntry]) -> Result<(), TransportError> {
    let mut index: Vec<IndexEntry> = entries
        .iter()
        .map(|e| IndexEntry {
            file: e.file_name(),
            request_key: e.request_key.clone(),
            sequence_index: e.sequence_index,
        })
        .collect();
    index.sort_by(|a, b| {
        (a.request_key.as_str(), a.sequence_index).cmp(&(b.request_key.as_str(), b.sequence_index))
    });
    let path = dir.join(INDEX_FILE);
    let mut json = serde_json::to_string_pretty(&index).map_err(|e| io_err(&path, e))?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| io_err(&path, e))
}

/// Writes a complete fixture set (entries plus index) into `dir`.
pub fn write_fixture_set(dir: &Path, entries: &[FixtureEntry]) -> Result<(), TransportError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for e in entries {
        write_entry(dir, e)?;
    }
    write_index(dir, entries)
}

/// Loads every entry listed in `dir/index.json`.
pub fn load_fixture_set(dir: &Path) -> Result<Vec<FixtureEntry>, TransportError> {
    let index_path = dir.join(INDEX_FILE);
    let text = fs::read_to_string(&index_path).map_err(|e| io_err(&index_path, e))?;
    let index: Vec<IndexEntry> = serde_json::from_str(&text).map_err(|e| corrupt(&index_path, e))?;
    index
        .iter()
        .map(|ix| {
            let path = dir.join(&ix.file);
            let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
            let entry: FixtureEntry = serde_json::from_str(&text).map_err(|e| corrupt(&path, e))?;
            if entry.request_key != ix.request_key || entry.sequence_index != ix.sequence_index {
                return Err(corrupt(&path, "entry does not match its index line"));
            }
            entry.body().map_err(|e| corrupt(&path, e))?;
            Ok(entry)
        })
        .collect()
}

#[derive(Debug, Default)]
struct ReplayLog {
    cursors: HashMap<String, usize>,
    served: Vec<String>,
    misses: Vec<String>,
}

/// Serves recorded responses. Unknown requests get a synthetic 404 (and are
/// logged as misses) unless the transport is strict, in which case they
/// fail with [`TransportError::UnmatchedRequest`]. Once a key's recorded
/// sequence is used up, its last entry keeps being served.
#[derive(Debug)]
pub struct ReplayTransport {
    entries: HashMap<String, Vec<FixtureEntry>>,
    strict: bool,
    log: Mutex<ReplayLog>,
}

impl ReplayTransport {
    pub fn from_entries(entries: Vec<FixtureEntry>) -> Result<Self, TransportError> {
        let mut by_key: HashMap<String, Vec<FixtureEntry>> = HashMap::new();
        for e in entries {
            by_key.entry(e.request_key.clone()).or_default().push(e);
        }
        for (key, seq) in &mut by_key {
            seq.sort_by_key(|e| e.sequence_index);
            for (i, e) in seq.iter().enumerate() {
                if e.sequence_index as usize != i {
                    return Err(TransportError::FixtureCorrupt {
                        path: key.clone(),
                        message: format!(
                            "sequence indices must run 0..n without gaps or repeats, found {} at position {i}",
                            e.sequence_index
                        ),
                    });
                }
            }
        }
        Ok(Self {
            entries: by_key,
            strict: false,
            log: Mutex::new(ReplayLog::default()),
        })
    }

    pub fn open(dir: impl AsRef<Path>) -> Result<Self, TransportError> {
        Self::from_entries(load_fixture_set(dir.as_ref())?)
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    /// Request keys in the order they were served (misses included).
    pub fn served(&self) -> Vec<String> {
        self.log.lock().unwrap().served.clone()
    }

    pub fn misses(&self) -> Vec<String> {
        self.log.lock().unwrap().misses.clone()
    }

    pub fn request_count(&self) -> usize {
        self.log.lock().unwrap().served.len()
    }
}

impl Transport for ReplayTransport {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let key = req.key();
        let mut log = self.log.lock().unwrap();
        log.served.push(key.clone());
        let Some(seq) = self.entries.get(&key) else {
            log.misses.push(key.clone());
            if self.strict {
                return Err(TransportError::UnmatchedRequest { request_key: key });
            }
            warn!(request = %key, "replay miss");
            return Ok(HttpResponse {
                status: 404,
                headers: BTreeMap::new(),
                body: br#"{"message":"Not Found"}"#.to_vec(),
            });
        };
        let cursor = log.cursors.entry(key).or_default();
        let entry = &seq[(*cursor).min(seq.len() - 1)];
        *cursor += 1;
        entry.to_response()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(path: &str) -> HttpRequest {
        HttpRequest {
            method: "GET",
            path: path.into(),
            query: vec![("page".into(), "1".into())],
            headers: vec![],
        }
    }

    fn resp(status: u16, body: &str) -> HttpResponse {
        HttpResponse {
            status,
            headers: BTreeMap::new(),
            body: body.as_bytes().to_vec(),
        }
    }

    #[test]
    fn serves_sequence_then_sticks_to_last() {
        let key = get("/x").key();
        let t = ReplayTransport::from_entries(vec![
            FixtureEntry::new(&key, 1, &resp(200, "second")),
            FixtureEntry::new(&key, 0, &resp(500, "first")),
        ])
        .unwrap();
        assert_eq!(t.send(&get("/x")).unwrap().body, b"first");
        assert_eq!(t.send(&get("/x")).unwrap().body, b"second");
        assert_eq!(t.send(&get("/x")).unwrap().body, b"second");
        assert_eq!(t.request_count(), 3);
    }

    #[test]
    fn unknown_request_is_404_or_error_when_strict() {
        let t = ReplayTransport::from_entries(vec![]).unwrap();
        assert_eq!(t.send(&get("/nope")).unwrap().status, 404);
        assert_eq!(t.misses(), vec!["GET /nope?page=1"]);
        let t = ReplayTransport::from_entries(vec![]).unwrap().strict(true);
        let err = t.send(&get("/nope")).unwrap_err();
        assert_eq!(
            err,
            TransportError::UnmatchedRequest {
                request_key: "GET /nope?page=1".into()
            }
        );
    }

    #[test]
    fn duplicate_sequence_index_is_corrupt() {
        let key = get("/x").key();
        let e = FixtureEntry::new(&key, 0, &resp(200, ""));
        assert!(matches!(
            ReplayTransport::from_entries(vec![e.clone(), e]),
            Err(TransportError::FixtureCorrupt { .. })
        ));
    }

    #[test]
    fn only_pagination_and_rate_headers_are_kept() {
        let mut r = resp(200, "");
        r.headers.insert("link".into(), "<u>; rel=\"next\"".into());
        r.headers.insert("x-ratelimit-remaining".into(), "10".into());
        r.headers.insert("set-cookie".into(), "session=abc".into());
        let e = FixtureEntry::new("GET /x", 0, &r);
        assert_eq!(e.headers.keys().collect::<Vec<_>>(), ["link", "x-ratelimit-remaining"]);
    }

    #[test]
    fn fixture_set_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let entries = vec![
            FixtureEntry::new("GET /a?page=1", 0, &resp(200, "[1]")),
            FixtureEntry::new("GET /a?page=1", 1, &resp(404, "{}")),
        ];
        write_fixture_set(dir.path(), &entries).unwrap();
        let mut loaded = load_fixture_set(dir.path()).unwrap();
        loaded.sort_by_key(|e| e.sequence_index);
        assert_eq!(loaded, entries);
        assert_eq!(entries[0].file_name().len(), "0123456789abcdef-0000.json".len());
    }

    #[test]
    fn corrupt_body_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = FixtureEntry::new("GET /a", 0, &resp(200, "[]"));
        e.body_b64 = "!!!".into();
        write_fixture_set(dir.path(), &[e]).unwrap();
        assert!(matches!(
            load_fixture_set(dir.path()),
            Err(TransportError::FixtureCorrupt { .. })
        ));
    }
}
