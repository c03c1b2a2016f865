mod common;

use std::sync::Arc;
use std::time::Duration;

use common::*;
use ghminer::client::{routes, ApiClient, ApiError, ApiRequest, Clock, Credentials, ManualClock, RetryPolicy};
use ghminer::replay::synthetic::FixtureBuilder;
use ghminer::replay::{load_fixture_set, ReplayTransport};
use serde_json::json;

fn paged(n: usize) -> ReplayTransport {
    let mut b = FixtureBuilder::new();
    let items: Vec<_> = (0..n).map(|i| json!({ "n": i })).collect();
    b.paginated(ApiRequest::new("/repos/o/r/stargazers"), &items);
    ReplayTransport::from_entries(b.build()).unwrap().strict(true)
}

#[test]
fn pagination_is_complete() {
    for n in [0usize, 1, 99, 100, 101, 250] {
        let t = Arc::new(paged(n));
        let c = client(t.clone(), Arc::new(ManualClock::at_secs(T0)));
        let out = c.fetch_pages(&ApiRequest::new("/repos/o/r/stargazers"), None).unwrap();
        let want_requests = n.div_ceil(100).max(1);
        assert_eq!(out.items.len(), n);
        assert_eq!(out.requests, want_requests, "n={n}");
        assert_eq!(t.request_count(), want_requests);
        let seen: Vec<u64> = out.items.iter().map(|v| v["n"].as_u64().unwrap()).collect();
        assert_eq!(seen, (0..n as u64).collect::<Vec<_>>());
    }
}

#[test]
fn cap_stops_early() {
    let t = Arc::new(paged(250));
    let c = client(t.clone(), Arc::new(ManualClock::at_secs(T0)));
    let out = c.fetch_pages(&ApiRequest::new("/repos/o/r/stargazers"), Some(150)).unwrap();
    assert_eq!(out.items.len(), 150);
    assert!(out.truncated);
    assert_eq!(t.request_count(), 2);
}

#[test]
fn exhausted_window_waits_for_reset() {
    let reset = T0 + 90;
    let mut b = FixtureBuilder::new().with_rate_headers(0, reset);
    b.json(routes::user("a"), 200, &json!({"login": "a", "id": 1}));
    let mut b2 = FixtureBuilder::new().with_rate_headers(4999, reset + 3600);
    b2.json(routes::user("b"), 200, &json!({"login": "b", "id": 2}));
    let mut entries = b.build();
    entries.extend(b2.build());

    let clock = Arc::new(ManualClock::at_secs(T0));
    let t = Arc::new(Timed::new(ReplayTransport::from_entries(entries).unwrap().strict(true), clock.clone()));
    let c = client(t.clone(), clock.clone());
    c.execute(&routes::user("a")).unwrap();
    c.execute(&routes::user("b")).unwrap();
    let sends = t.sends();
    assert_eq!(sends.len(), 2);
    assert_eq!(sends[0].0, T0 * 1000);
    assert!(sends[1].0 >= reset * 1000, "{sends:?}");
}

#[test]
fn rate_limited_403_is_retried_after_reset() {
    let reset = T0 + 30;
    let mut b = FixtureBuilder::new().with_rate_headers(0, reset);
    b.json(routes::user("a"), 403, &json!({"message": "API rate limit exceeded"}));
    let mut ok = FixtureBuilder::new().with_rate_headers(4999, reset + 3600);
    ok.json(routes::user("a"), 200, &json!({"login": "a", "id": 1}));
    let mut entries = b.build();
    let mut second = ok.build();
    second[0].sequence_index = 1;
    entries.extend(second);

    let clock = Arc::new(ManualClock::at_secs(T0));
    let t = Arc::new(Timed::new(ReplayTransport::from_entries(entries).unwrap().strict(true), clock.clone()));
    let page = client(t.clone(), clock).execute(&routes::user("a")).unwrap();
    assert_eq!(page.items[0]["login"], "a");
    let sends = t.sends();
    assert_eq!(sends.len(), 2);
    assert!(sends[1].0 >= reset * 1000);
}

#[test]
fn reset_beyond_deadline_errors() {
    let mut b = FixtureBuilder::new().with_rate_headers(0, T0 + 10_000);
    b.json(routes::user("a"), 200, &json!({"login": "a", "id": 1}));
    b.json(routes::user("b"), 200, &json!({"login": "b", "id": 2}));
    let t = Arc::new(ReplayTransport::from_entries(b.build()).unwrap().strict(true));
    let c = client(t.clone(), Arc::new(ManualClock::at_secs(T0))).with_rate_deadline(Duration::from_secs(60));
    c.execute(&routes::user("a")).unwrap();
    let err = c.execute(&routes::user("b")).unwrap_err();
    assert!(matches!(err, ApiError::RateLimitDeadlineExceeded { reset_at } if reset_at == T0 + 10_000));
    assert_eq!(t.request_count(), 1);
}

#[test]
fn server_errors_retry_then_give_up() {
    let mut b = FixtureBuilder::new();
    b.json(routes::user("a"), 502, &json!({}));
    b.json(routes::user("a"), 200, &json!({"login": "a", "id": 1}));
    b.json(routes::user("z"), 503, &json!({}));
    let clock = Arc::new(ManualClock::at_secs(T0));
    let t = Arc::new(ReplayTransport::from_entries(b.build()).unwrap().strict(true));
    let c = client(t.clone(), clock.clone());
    assert!(c.execute(&routes::user("a")).is_ok());
    let err = c.execute(&routes::user("z")).unwrap_err();
    assert_eq!(err.status(), Some(503));
    // 2 for "a", 3 for "z"
    assert_eq!(t.request_count(), 5);
    // three jittered backoffs, each under its cap
    assert!(clock.now_millis() - T0 * 1000 <= 500 + 1000 + 2000);
}

#[test]
fn client_errors_are_not_retried() {
    let mut b = FixtureBuilder::new();
    b.json(routes::user("a"), 422, &json!({}));
    let t = Arc::new(ReplayTransport::from_entries(b.build()).unwrap().strict(true));
    let c = client(t.clone(), Arc::new(ManualClock::at_secs(T0))).with_retry(RetryPolicy::default());
    assert_eq!(c.execute(&routes::user("a")).unwrap_err().status(), Some(422));
    assert_eq!(t.request_count(), 1);
}

#[test]
fn strict_replay_names_missing_key() {
    let c = client(replay(USER_SET), Arc::new(ManualClock::at_secs(T0)));
    match c.execute(&routes::user("nobody")).unwrap_err() {
        ApiError::UnmatchedRequest { request_key } => {
            assert_eq!(request_key, "GET /users/nobody?page=1&per_page=100")
        }
        other => panic!("{other}"),
    }
}

const USER_SET: &str = "user";

#[test]
fn lenient_replay_serves_404_and_logs_miss() {
    let t = Arc::new(ReplayTransport::open(fixture_dir(USER_SET)).unwrap());
    let c = client(t.clone(), Arc::new(ManualClock::at_secs(T0)));
    assert_eq!(c.execute(&routes::user("nobody")).unwrap_err().status(), Some(404));
    assert_eq!(t.misses(), vec!["GET /users/nobody?page=1&per_page=100".to_string()]);
}

#[test]
fn private_repo_needs_token() {
    let anon = client(replay("private_anon"), Arc::new(ManualClock::at_secs(T0)));
    let err = anon.execute(&routes::repository("acme/secret")).unwrap_err();
    assert!(matches!(err, ApiError::Auth { .. }), "{err}");

    let authed = ApiClient::new(replay("private_auth"), Credentials::with_token("ghp_exampletoken"))
        .with_clock(Arc::new(ManualClock::at_secs(T0)));
    let page = authed.execute(&routes::repository("acme/secret")).unwrap();
    assert_eq!(page.items[0]["full_name"], "acme/secret");
}

#[test]
fn rate_headers_surface_on_pages() {
    let c = client(replay(USER_SET), Arc::new(ManualClock::at_secs(T0)));
    let page = c.execute(&routes::user("octo")).unwrap();
    assert_eq!(page.rate_remaining, Some(4_990));
    assert!(page.rate_reset.is_some());
}

#[test]
fn committed_fixtures_match_generator() {
    for (name, entries) in ghminer::replay::sets::all() {
        let mut on_disk = load_fixture_set(&fixture_dir(name)).unwrap();
        let mut want = entries;
        let key = |e: &ghminer::replay::FixtureEntry| (e.request_key.clone(), e.sequence_index);
        on_disk.sort_by_key(key);
        want.sort_by_key(key);
        assert_eq!(on_disk, want, "{name}: rerun `cargo run --example gen_fixtures`");
    }
}
