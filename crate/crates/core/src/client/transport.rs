//! Wire-level request/response types and the pluggable transport.

use std::collections::BTreeMap;
use std::time::Duration;

use thiserror::Error;

/// A fully resolved GET request, independent of the host it is sent to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpRequest {
    pub method: &'static str,
    pub path: String,
    /// Query pairs, already sorted by key.
    pub query: Vec<(String, String)>,
    pub headers: Vec<(String, String)>,
}

impl HttpRequest {
    /// Canonical `METHOD /path?k=v&...` line. Query values are form-encoded
    /// and pairs appear in key order, so equal requests yield equal keys.
    pub fn key(&self) -> String {
        let mut line = format!("{} {}", self.method, self.path);
        let query = self.encoded_query();
        if !query.is_empty() {
            line.push('?');
            line.push_str(&query);
        }
        line
    }

    pub fn encoded_query(&self) -> String {
        let mut ser = url::form_urlencoded::Serializer::new(String::new());
        for (k, v) in &self.query {
            ser.append_pair(k, v);
        }
        ser.finish()
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    /// Header names are lower-cased.
    pub headers: BTreeMap<String, String>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(&name.to_ascii_lowercase()).map(String::as_str)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("network failure on {request_key}: {message}")]
    Network { request_key: String, message: String },
    #[error("no fixture recorded for {request_key}")]
    UnmatchedRequest { request_key: String },
    #[error("fixture corrupt at {path}: {message}")]
    FixtureCorrupt { path: String, message: String },
    #[error("fixture i/o failure at {path}: {message}")]
    Io { path: String, message: String },
}

impl TransportError {
    /// Only network failures are worth another attempt; fixture problems
    /// are deterministic.
    pub fn is_retryable(&self) -> bool {
        matches!(self, TransportError::Network { .. })
    }
}

/// Anything that can answer an [`HttpRequest`]: the live API, a replay
/// fixture set, or a recorder wrapping either.
pub trait Transport: Send + Sync {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
        (**self).send(req)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
        (**self).send(req)
    }
}

pub const GITHUB_API_BASE: &str = "https://api.github.com";

/// Blocking HTTPS transport against a real API host.
pub struct HttpTransport {
    base_url: String,
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(base_url: impl Into<String>) -> Result<Self, TransportError> {
        let base_url = base_url.into().trim_end_matches('/').to_string();
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("ghminer/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| TransportError::Network {
                request_key: base_url.clone(),
                message: e.to_string(),
            })?;
        Ok(Self { base_url, client })
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }
}

impl Transport for HttpTransport {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let mut url = format!("{}{}", self.base_url, req.path);
        let query = req.encoded_query();
        if !query.is_empty() {
            url.push('?');
            url.push_str(&query);
        }
        let network = |e: reqwest::Error| TransportError::Network {
            request_key: req.key(),
            message: e.to_string(),
        };
        let mut builder = self.client.get(&url);
        for (name, value) in &req.headers {
            builder = builder.header(name, value);
        }
        let resp = builder.send().map_err(network)?;
        let status = resp.status().as_u16();
        let headers = resp
            .headers()
            .iter()
            .filter_map(|(k, v)| {
                v.to_str()
                    .ok()
                    .map(|v| (k.as_str().to_ascii_lowercase(), v.to_string()))
            })
            .collect();
        let body = resp.bytes().map_err(network)?.to_vec();
        Ok(HttpResponse {
            status,
            headers,
            body,
        })
    }
}
