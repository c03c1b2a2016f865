//! Paginated, rate-limit-aware access to the GitHub REST API (v3).
//!
//! [`ApiClient`] turns an [`ApiRequest`] into a wire request, hands it to a
//! [`Transport`] (live HTTPS, replay fixtures, or a recorder), and decodes
//! the answer into a [`Page`] of raw JSON records. A shared gate blocks new
//! requests while the last observed rate-limit window is exhausted; 5xx
//! responses and network failures are retried with capped exponential
//! backoff and full jitter.

mod clock;
pub mod routes;
mod transport;

pub use clock::{Clock, ManualClock, SystemClock};
pub use transport::{
    HttpRequest, HttpResponse, HttpTransport, Transport, TransportError, GITHUB_API_BASE,
};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use thiserror::Error;
use tracing::{debug, warn};

pub const MAX_PER_PAGE: u32 = 100;
pub const ACCEPT_V3: &str = "application/vnd.github.v3+json";

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("authentication failed (401) for {request_key}")]
    Auth { request_key: String },
    #[error("not found (404): {request_key}")]
    NotFound { request_key: String },
    #[error("rate limit window resets at {reset_at}, beyond the configured wait deadline")]
    RateLimitDeadlineExceeded { reset_at: i64 },
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("malformed JSON from {request_key}: {message}")]
    Decode { request_key: String, message: String },
    #[error("unexpected HTTP status {status} for {request_key}")]
    Status { status: u16, request_key: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("no fixture recorded for {request_key}")]
    UnmatchedRequest { request_key: String },
    #[error("fixture error: {0}")]
    Fixture(TransportError),
    #[error("pagination stopped after {} item(s): {source}", items.len())]
    PartialResult {
        items: Vec<Value>,
        #[source]
        source: Box<ApiError>,
    },
}

impl ApiError {
    /// HTTP status carried by the error, if it came from a response.
    pub fn status(&self) -> Option<u16> {
        match self {
            ApiError::Auth { .. } => Some(401),
            ApiError::NotFound { .. } => Some(404),
            ApiError::Status { status, .. } => Some(*status),
            ApiError::PartialResult { source, .. } => source.status(),
            _ => None,
        }
    }
}

/// Personal access token. Never printed.
#[derive(Clone, PartialEq, Eq)]
pub struct Secret(String);

impl Secret {
    pub fn new(value: impl Into<String>) -> Self {
        Self(value.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Secret(***)")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Credentials {
    pub username: Option<String>,
    pub token: Option<Secret>,
}

impl Credentials {
    pub fn anonymous() -> Self {
        Self::default()
    }

    pub fn with_token(token: impl Into<String>) -> Self {
        Self {
            username: None,
            token: Some(Secret::new(token)),
        }
    }
}

/// One page of one API route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiRequest {
    path: String,
    query: BTreeMap<String, String>,
    page: u32,
    per_page: u32,
}

impl ApiRequest {
    pub fn new(path: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            query: BTreeMap::new(),
            page: 1,
            per_page: MAX_PER_PAGE,
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.query.insert(key.into(), value.into());
        self
    }

    pub fn with_page(mut self, page: u32) -> Self {
        self.page = page;
        self
    }

    pub fn with_per_page(mut self, per_page: u32) -> Self {
        self.per_page = per_page;
        self
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn page(&self) -> u32 {
        self.page
    }

    pub fn per_page(&self) -> u32 {
        self.per_page
    }

    pub fn validate(&self) -> Result<(), ApiError> {
        if !self.path.starts_with('/') {
            return Err(ApiError::InvalidRequest(format!(
                "path must start with '/': {}",
                self.path
            )));
        }
        if self.page < 1 {
            return Err(ApiError::InvalidRequest("page must be >= 1".into()));
        }
        if !(1..=MAX_PER_PAGE).contains(&self.per_page) {
            return Err(ApiError::InvalidRequest(format!(
                "per_page must be in 1..={MAX_PER_PAGE}, got {}",
                self.per_page
            )));
        }
        if self.query.contains_key("page") || self.query.contains_key("per_page") {
            return Err(ApiError::InvalidRequest(
                "page/per_page are set through the request, not as params".into(),
            ));
        }
        Ok(())
    }

    /// Query pairs including pagination, sorted by key.
    pub fn query_pairs(&self) -> Vec<(String, String)> {
        let mut all = self.query.clone();
        all.insert("page".into(), self.page.to_string());
        all.insert("per_page".into(), self.per_page.to_string());
        all.into_iter().collect()
    }

    /// The canonical request line, e.g. `GET /repos/o/r?page=1&per_page=100`.
    pub fn request_line(&self) -> String {
        self.to_http(Vec::new()).key()
    }

    fn to_http(&self, headers: Vec<(String, String)>) -> HttpRequest {
        HttpRequest {
            method: "GET",
            path: self.path.clone(),
            query: self.query_pairs(),
            headers,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Page {
    pub items: Vec<Value>,
    pub has_next: bool,
    /// `None` when the response carried no rate-limit headers.
    pub rate_remaining: Option<u64>,
    pub rate_reset: Option<i64>,
    pub status: u16,
    /// Present on search responses.
    pub total_count: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    pub fn new(max_attempts: u32, base_delay: Duration, max_delay: Duration) -> Self {
        Self {
            max_attempts: max_attempts.max(1),
            base_delay,
            max_delay,
        }
    }

    /// Upper bound of the sleep before retry number `retry` (1-based):
    /// `min(max_delay, base_delay * 2^(retry-1))`.
    pub fn delay_cap(&self, retry: u32) -> Duration {
        let shift = retry.saturating_sub(1).min(31);
        let grown = self.base_delay.saturating_mul(1u32 << shift);
        grown.min(self.max_delay)
    }

    /// Full jitter: uniform in `[0, delay_cap(retry)]`.
    pub fn jittered_delay<R: Rng + ?Sized>(&self, retry: u32, rng: &mut R) -> Duration {
        let cap = self.delay_cap(retry).as_millis() as u64;
        Duration::from_millis(rng.gen_range(0..=cap))
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct RateState {
    remaining: Option<u64>,
    reset: Option<i64>,
}

/// Everything collected by [`ApiClient::fetch_pages`].
#[derive(Debug, Clone, PartialEq)]
pub struct FetchOutcome {
    pub items: Vec<Value>,
    pub requests: usize,
    pub total_count: Option<u64>,
    /// True when the cap cut the walk short while the server had more.
    pub truncated: bool,
}

pub struct ApiClient {
    transport: Arc<dyn Transport>,
    creds: Credentials,
    clock: Arc<dyn Clock>,
    retry: RetryPolicy,
    rate_deadline: Duration,
    gate: Mutex<RateState>,
    rng: Mutex<StdRng>,
}

impl fmt::Debug for ApiClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApiClient")
            .field("creds", &self.creds)
            .field("retry", &self.retry)
            .field("rate_deadline", &self.rate_deadline)
            .finish_non_exhaustive()
    }
}

impl ApiClient {
    /// Two hours: twice GitHub's one-hour rate-limit window.
    pub const DEFAULT_RATE_DEADLINE: Duration = Duration::from_secs(2 * 3600);

    pub fn new(transport: Arc<dyn Transport>, creds: Credentials) -> Self {
        Self {
            transport,
            creds,
            clock: Arc::new(SystemClock),
            retry: RetryPolicy::default(),
            rate_deadline: Self::DEFAULT_RATE_DEADLINE,
            gate: Mutex::new(RateState::default()),
            rng: Mutex::new(StdRng::from_entropy()),
        }
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_rate_deadline(mut self, deadline: Duration) -> Self {
        self.rate_deadline = deadline;
        self
    }

    pub fn with_seed(self, seed: u64) -> Self {
        *self.rng.lock().unwrap() = StdRng::seed_from_u64(seed);
        self
    }

    pub fn credentials(&self) -> &Credentials {
        &self.creds
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    fn headers(&self) -> Vec<(String, String)> {
        let mut h = vec![("Accept".to_string(), ACCEPT_V3.to_string())];
        if let Some(token) = &self.creds.token {
            h.push(("Authorization".into(), format!("token {}", token.expose())));
        }
        h
    }

    /// Sends one page request and decodes it.
    pub fn execute(&self, req: &ApiRequest) -> Result<Page, ApiError> {
        req.validate()?;
        let http = req.to_http(self.headers());
        let key = http.key();
        let mut failures = 0u32;
        let mut rate_waited = Duration::ZERO;
        loop {
            self.pass_gate(&mut rate_waited)?;
            debug!(request = %key, "sending");
            let resp = match self.transport.send(&http) {
                Ok(resp) => resp,
                Err(TransportError::UnmatchedRequest { request_key }) => {
                    return Err(ApiError::UnmatchedRequest { request_key })
                }
                Err(e) if e.is_retryable() => {
                    failures += 1;
                    if failures >= self.retry.max_attempts {
                        return Err(ApiError::Transport {
                            attempts: failures,
                            message: e.to_string(),
                        });
                    }
                    warn!(request = %key, error = %e, "retrying after transport failure");
                    self.backoff(failures);
                    continue;
                }
                Err(e) => return Err(ApiError::Fixture(e)),
            };

            let remaining = header_u64(&resp, "x-ratelimit-remaining");
            let reset = header_u64(&resp, "x-ratelimit-reset").map(|r| r as i64);
            let rate_limited =
                matches!(resp.status, 403 | 429) && remaining == Some(0);
            self.observe_rate(remaining, reset, rate_limited);

            match resp.status {
                200..=299 => return decode_page(&key, resp, remaining, reset),
                _ if rate_limited => {
                    warn!(request = %key, reset = ?reset, "rate limited; waiting for reset");
                    continue;
                }
                401 => return Err(ApiError::Auth { request_key: key }),
                404 => return Err(ApiError::NotFound { request_key: key }),
                status @ (429 | 500..=599) => {
                    failures += 1;
                    if failures >= self.retry.max_attempts {
                        return Err(ApiError::Status {
                            status,
                            request_key: key,
                        });
                    }
                    warn!(request = %key, status, "retrying after server error");
                    self.backoff(failures);
                }
                status => {
                    return Err(ApiError::Status {
                        status,
                        request_key: key,
                    })
                }
            }
        }
    }

    /// Walks pages starting at `req` (which must be page 1) until the server
    /// reports no next page or `cap` items have been collected.
    pub fn fetch_all(&self, req: &ApiRequest, cap: Option<usize>) -> Result<Vec<Value>, ApiError> {
        self.fetch_pages(req, cap).map(|o| o.items)
    }

    pub fn fetch_pages(&self, req: &ApiRequest, cap: Option<usize>) -> Result<FetchOutcome, ApiError> {
        if req.page != 1 {
            return Err(ApiError::InvalidRequest(
                "exhaustive pagination must start at page 1".into(),
            ));
        }
        if cap == Some(0) {
            return Err(ApiError::InvalidRequest("cap must be positive".into()));
        }
        let mut out = FetchOutcome {
            items: Vec::new(),
            requests: 0,
            total_count: None,
            truncated: false,
        };
        let mut page_no = 1;
        loop {
            let page = match self.execute(&req.clone().with_page(page_no)) {
                Ok(p) => p,
                Err(e) if page_no == 1 => return Err(e),
                Err(e) => {
                    return Err(ApiError::PartialResult {
                        items: out.items,
                        source: Box::new(e),
                    })
                }
            };
            out.requests += 1;
            out.total_count = out.total_count.or(page.total_count);
            let last = !page.has_next || page.items.is_empty();
            out.items.extend(page.items);
            if let Some(cap) = cap {
                if out.items.len() >= cap {
                    out.truncated = out.items.len() > cap || !last;
                    out.items.truncate(cap);
                    break;
                }
            }
            if last {
                break;
            }
            page_no += 1;
        }
        Ok(out)
    }

    /// Blocks while the last observed window is exhausted. Holding the lock
    /// while sleeping keeps every other caller parked behind the same gate.
    fn pass_gate(&self, waited: &mut Duration) -> Result<(), ApiError> {
        let mut state = self.gate.lock().unwrap();
        if state.remaining != Some(0) {
            return Ok(());
        }
        let Some(reset) = state.reset else {
            return Ok(());
        };
        let now = self.clock.now_millis();
        let reset_ms = reset * 1000;
        if now < reset_ms {
            let wait = Duration::from_millis((reset_ms - now) as u64);
            if *waited + wait > self.rate_deadline {
                return Err(ApiError::RateLimitDeadlineExceeded { reset_at: reset });
            }
            debug!(wait_ms = wait.as_millis() as u64, "rate-limit gate closed");
            self.clock.sleep(wait);
            *waited += wait;
        }
        state.remaining = None;
        Ok(())
    }

    fn observe_rate(&self, remaining: Option<u64>, reset: Option<i64>, rate_limited: bool) {
        let mut state = self.gate.lock().unwrap();
        if remaining.is_some() {
            state.remaining = remaining;
            state.reset = reset;
        }
        if rate_limited {
            // A stale or missing reset would let the retry fire immediately.
            let floor = self.clock.now_secs() + 1;
            state.reset = Some(state.reset.map_or(floor, |r| r.max(floor)));
        }
    }

    fn backoff(&self, retry: u32) {
        let delay = {
            let mut rng = self.rng.lock().unwrap();
            self.retry.jittered_delay(retry, &mut *rng)
        };
        self.clock.sleep(delay);
    }
}

fn header_u64(resp: &HttpResponse, name: &str) -> Option<u64> {
    resp.header(name).and_then(|v| v.trim().parse().ok())
}

/// True when an RFC 8288 `Link` header advertises `rel="next"`.
pub fn link_has_next(link: &str) -> bool {
    link.split(',').any(|part| {
        part.split(';').skip(1).any(|param| {
            let param = param.trim();
            param
                .strip_prefix("rel=")
                .map(|v| v.trim_matches('"').split_whitespace().any(|r| r == "next"))
                .unwrap_or(false)
        })
    })
}

fn decode_page(
    key: &str,
    resp: HttpResponse,
    remaining: Option<u64>,
    reset: Option<i64>,
) -> Result<Page, ApiError> {
    let has_next = resp.header("link").map(link_has_next).unwrap_or(false);
    let mut page = Page {
        items: Vec::new(),
        has_next,
        rate_remaining: remaining,
        rate_reset: reset,
        status: resp.status,
        total_count: None,
    };
    if resp.status == 204 || resp.body.iter().all(u8::is_ascii_whitespace) {
        return Ok(page);
    }
    let decode_err = |message: String| ApiError::Decode {
        request_key: key.to_string(),
        message,
    };
    let value: Value = serde_json::from_slice(&resp.body).map_err(|e| decode_err(e.to_string()))?;
    match value {
        Value::Array(items) => page.items = items,
        Value::Object(mut obj) if obj.get("items").is_some_and(Value::is_array) => {
            page.total_count = obj.get("total_count").and_then(Value::as_u64);
            if let Some(Value::Array(items)) = obj.remove("items") {
                page.items = items;
            }
        }
        Value::Object(obj) => page.items = vec![Value::Object(obj)],
        other => {
            return Err(decode_err(format!(
                "expected an object or array, got {}",
                json_kind(&other)
            )))
        }
    }
    Ok(page)
}

fn json_kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    struct Scripted {
        responses: Mutex<VecDeque<Result<HttpResponse, TransportError>>>,
        seen: Mutex<Vec<HttpRequest>>,
    }

    impl Scripted {
        fn new(responses: Vec<Result<HttpResponse, TransportError>>) -> Arc<Self> {
            Arc::new(Self {
                responses: Mutex::new(responses.into()),
                seen: Mutex::new(Vec::new()),
            })
        }
    }

    impl Transport for Scripted {
        fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
            self.seen.lock().unwrap().push(req.clone());
            self.responses
                .lock()
                .unwrap()
                .pop_front()
                .expect("script exhausted")
        }
    }

    fn ok(body: &str) -> Result<HttpResponse, TransportError> {
        status(200, body)
    }

    fn status(code: u16, body: &str) -> Result<HttpResponse, TransportError> {
        Ok(HttpResponse {
            status: code,
            headers: BTreeMap::new(),
            body: body.as_bytes().to_vec(),
        })
    }

    fn client(t: Arc<Scripted>) -> ApiClient {
        ApiClient::new(t, Credentials::anonymous())
            .with_clock(Arc::new(ManualClock::at_secs(0)))
            .with_seed(7)
    }

    #[test]
    fn request_line_sorts_params() {
        let req = ApiRequest::new("/search/repositories")
            .param("sort", "stars")
            .param("q", "compilers")
            .param("order", "desc");
        assert_eq!(
            req.request_line(),
            "GET /search/repositories?order=desc&page=1&per_page=100&q=compilers&sort=stars"
        );
    }

    #[test]
    fn per_page_out_of_range_is_rejected() {
        for n in [0, 101] {
            let err = ApiRequest::new("/x").with_per_page(n).validate().unwrap_err();
            assert!(matches!(err, ApiError::InvalidRequest(_)));
        }
        assert!(ApiRequest::new("/x").with_page(0).validate().is_err());
        assert!(ApiRequest::new("/x").param("page", "2").validate().is_err());
    }

    #[test]
    fn link_header_parsing() {
        let link = r#"<https://api.github.com/x?page=2>; rel="next", <https://api.github.com/x?page=5>; rel="last""#;
        assert!(link_has_next(link));
        let link = r#"<https://api.github.com/x?page=1>; rel="prev", <https://api.github.com/x?page=1>; rel="first""#;
        assert!(!link_has_next(link));
        assert!(!link_has_next(""));
    }

    #[test]
    fn token_goes_in_authorization_header() {
        let t = Scripted::new(vec![ok("[]")]);
        let c = ApiClient::new(t.clone(), Credentials::with_token("abc123"));
        c.execute(&ApiRequest::new("/x")).unwrap();
        let seen = t.seen.lock().unwrap();
        assert_eq!(seen[0].header("authorization"), Some("token abc123"));
        assert_eq!(seen[0].header("accept"), Some(ACCEPT_V3));
    }

    #[test]
    fn credentials_debug_hides_token() {
        let c = Credentials::with_token("supersecret");
        assert!(!format!("{c:?}").contains("supersecret"));
    }

    #[test]
    fn single_object_becomes_one_item() {
        let t = Scripted::new(vec![ok(r#"{"id":1}"#)]);
        let page = client(t).execute(&ApiRequest::new("/repos/o/r")).unwrap();
        assert_eq!(page.items.len(), 1);
        assert!(!page.has_next);
    }

    #[test]
    fn search_envelope_unwraps_items() {
        let t = Scripted::new(vec![ok(r#"{"total_count":1500,"items":[{"id":1},{"id":2}]}"#)]);
        let page = client(t).execute(&ApiRequest::new("/search/repositories")).unwrap();
        assert_eq!(page.items.len(), 2);
        assert_eq!(page.total_count, Some(1500));
    }

    #[test]
    fn no_content_is_empty_page() {
        let t = Scripted::new(vec![status(204, "")]);
        let page = client(t).execute(&ApiRequest::new("/x")).unwrap();
        assert!(page.items.is_empty());
    }

    #[test]
    fn status_mapping() {
        let t = Scripted::new(vec![status(401, "{}"), status(404, "{}"), status(422, "{}")]);
        let c = client(t);
        let req = ApiRequest::new("/x");
        assert!(matches!(c.execute(&req), Err(ApiError::Auth { .. })));
        assert!(matches!(c.execute(&req), Err(ApiError::NotFound { .. })));
        assert!(matches!(c.execute(&req), Err(ApiError::Status { status: 422, .. })));
    }

    #[test]
    fn malformed_json_is_decode_error() {
        let t = Scripted::new(vec![ok("{not json")]);
        let err = client(t).execute(&ApiRequest::new("/x")).unwrap_err();
        assert!(matches!(err, ApiError::Decode { .. }));
        let t = Scripted::new(vec![ok("42")]);
        let err = client(t).execute(&ApiRequest::new("/x")).unwrap_err();
        assert!(matches!(err, ApiError::Decode { .. }));
    }

    #[test]
    fn server_errors_retry_until_success() {
        let t = Scripted::new(vec![status(500, ""), status(502, ""), ok("[1]")]);
        let page = client(t.clone()).execute(&ApiRequest::new("/x")).unwrap();
        assert_eq!(page.items, vec![serde_json::json!(1)]);
        assert_eq!(t.seen.lock().unwrap().len(), 3);
    }

    #[test]
    fn server_errors_exhaust_attempts() {
        let t = Scripted::new(vec![status(500, ""), status(500, ""), status(500, "")]);
        let err = client(t.clone()).execute(&ApiRequest::new("/x")).unwrap_err();
        assert!(matches!(err, ApiError::Status { status: 500, .. }));
        assert_eq!(t.seen.lock().unwrap().len(), 3);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let t = Scripted::new(vec![status(422, ""), ok("[]")]);
        assert!(client(t.clone()).execute(&ApiRequest::new("/x")).is_err());
        assert_eq!(t.seen.lock().unwrap().len(), 1);
    }

    #[test]
    fn network_failures_retry_then_surface() {
        let net = || {
            Err(TransportError::Network {
                request_key: "GET /x".into(),
                message: "connection refused".into(),
            })
        };
        let t = Scripted::new(vec![net(), net(), net()]);
        let err = client(t).execute(&ApiRequest::new("/x")).unwrap_err();
        assert!(matches!(err, ApiError::Transport { attempts: 3, .. }));
        assert!(err.to_string().contains("connection refused"));
    }

    #[test]
    fn backoff_delays_are_capped() {
        let p = RetryPolicy::default();
        assert_eq!(p.delay_cap(1), Duration::from_millis(500));
        assert_eq!(p.delay_cap(2), Duration::from_millis(1000));
        assert_eq!(p.delay_cap(5), Duration::from_secs(8));
        assert_eq!(p.delay_cap(40), Duration::from_secs(8));
        let mut rng = StdRng::seed_from_u64(1);
        for retry in 1..10 {
            assert!(p.jittered_delay(retry, &mut rng) <= p.delay_cap(retry));
        }
    }

    #[test]
    fn partial_result_keeps_earlier_pages() {
        let mut first = ok("[1,2]").unwrap();
        first
            .headers
            .insert("link".into(), r#"<http://h/x?page=2>; rel="next""#.into());
        let t = Scripted::new(vec![Ok(first), status(404, "")]);
        let err = client(t).fetch_all(&ApiRequest::new("/x"), None).unwrap_err();
        match err {
            ApiError::PartialResult { items, source } => {
                assert_eq!(items.len(), 2);
                assert!(matches!(*source, ApiError::NotFound { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deadline_exceeded_when_reset_is_too_far() {
        let mut limited = status(403, "{}").unwrap();
        limited.headers.insert("x-ratelimit-remaining".into(), "0".into());
        limited.headers.insert("x-ratelimit-reset".into(), "100000".into());
        let t = Scripted::new(vec![Ok(limited)]);
        let c = client(t).with_rate_deadline(Duration::from_secs(60));
        let err = c.execute(&ApiRequest::new("/x")).unwrap_err();
        assert!(matches!(err, ApiError::RateLimitDeadlineExceeded { reset_at: 100000 }));
    }
}
