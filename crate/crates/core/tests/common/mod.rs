#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use ghminer::client::{
    ApiClient, Clock, Credentials, HttpRequest, HttpResponse, ManualClock, Transport, TransportError,
};
use ghminer::pipeline::{Extractor, FilterCriteria};
use ghminer::replay::{load_fixture_set, FixtureEntry, ReplayTransport};
use serde_json::Value;

/// 2016-01-01T00:00:00Z
pub const T0: i64 = 1_451_606_400;

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn replay(name: &str) -> Arc<ReplayTransport> {
    Arc::new(ReplayTransport::open(fixture_dir(name)).unwrap().strict(true))
}

pub fn client(transport: Arc<dyn Transport>, clock: Arc<ManualClock>) -> ApiClient {
    ApiClient::new(transport, Credentials::anonymous())
        .with_clock(clock)
        .with_seed(7)
}

pub fn extractor(name: &str) -> (Extractor, Arc<ReplayTransport>) {
    let t = replay(name);
    let c = client(t.clone(), Arc::new(ManualClock::at_secs(T0)));
    (Extractor::new(Arc::new(c)).unwrap(), t)
}

/// Logs the clock reading at every send.
pub struct Timed<T> {
    pub inner: T,
    pub clock: Arc<ManualClock>,
    pub sends: Mutex<Vec<(i64, String)>>,
}

impl<T> Timed<T> {
    pub fn new(inner: T, clock: Arc<ManualClock>) -> Self {
        Self {
            inner,
            clock,
            sends: Mutex::new(Vec::new()),
        }
    }

    pub fn sends(&self) -> Vec<(i64, String)> {
        self.sends.lock().unwrap().clone()
    }
}

impl<T: Transport> Transport for Timed<T> {
    fn send(&self, req: &HttpRequest) -> Result<HttpResponse, TransportError> {
        self.sends
            .lock()
            .unwrap()
            .push((self.clock.now_millis(), req.key()));
        self.inner.send(req)
    }
}

/// Raw view of a fixture set: path -> pages in page order.
pub struct RawSet {
    pages: BTreeMap<String, Vec<(u32, u16, Value)>>,
}

impl RawSet {
    pub fn load(name: &str) -> Self {
        Self::from_entries(&load_fixture_set(&fixture_dir(name)).unwrap())
    }

    pub fn from_entries(entries: &[FixtureEntry]) -> Self {
        let mut pages: BTreeMap<String, Vec<(u32, u16, Value)>> = BTreeMap::new();
        for e in entries {
            let line = e.request_key.strip_prefix("GET ").unwrap();
            let (path, query) = line.split_once('?').unwrap_or((line, ""));
            let page = query
                .split('&')
                .find_map(|kv| kv.strip_prefix("page="))
                .map_or(1, |p| p.parse().unwrap());
            let body: Value = serde_json::from_slice(&e.body().unwrap()).unwrap_or(Value::Null);
            pages
                .entry(path.to_string())
                .or_default()
                .push((page, e.status, body));
        }
        for v in pages.values_mut() {
            v.sort_by_key(|p| p.0);
        }
        Self { pages }
    }

    pub fn ok(&self, path: &str) -> bool {
        self.pages
            .get(path)
            .is_some_and(|p| p.iter().all(|(_, s, _)| (200..300).contains(s)))
    }

    /// All items across pages; search pages unwrap `items`.
    pub fn items(&self, path: &str) -> Vec<Value> {
        let mut out = Vec::new();
        for (_, _, body) in self.pages.get(path).into_iter().flatten() {
            match body {
                Value::Array(a) => out.extend(a.iter().cloned()),
                Value::Object(o) if o.contains_key("items") => {
                    out.extend(o["items"].as_array().unwrap().iter().cloned())
                }
                other => out.push(other.clone()),
            }
        }
        out
    }

    pub fn object(&self, path: &str) -> Value {
        self.pages[path][0].2.clone()
    }

    pub fn search_items(&self) -> Vec<Value> {
        self.items("/search/repositories")
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Brute {
    pub counts: [usize; 4],
    /// Survivors as full names, stars desc then name.
    pub survivors: Vec<String>,
}

/// Straight scan over the fixture bodies, no pipeline code involved.
pub fn brute_force(raw: &RawSet, c: &FilterCriteria) -> Brute {
    let mut all: Vec<(u64, String, u64)> = raw
        .search_items()
        .iter()
        .map(|v| {
            (
                v["stargazers_count"].as_u64().unwrap(),
                v["full_name"].as_str().unwrap().to_string(),
                v["forks_count"].as_u64().unwrap(),
            )
        })
        .collect();
    all.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    if let Some(m) = c.max_repos {
        all.truncate(m);
    }
    let searched = all.len();
    let basic: Vec<_> = all
        .into_iter()
        .filter(|(s, _, f)| *s >= c.min_stars && *f >= c.min_forks)
        .collect();
    let releases: Vec<_> = basic
        .iter()
        .filter(|(_, n, _)| {
            let p = |r: &str| format!("/repos/{n}/{r}");
            raw.ok(&p("languages"))
                && raw.ok(&p("releases"))
                && raw.items(&p("releases")).len() as u64 >= c.min_releases
        })
        .collect();
    let survivors: Vec<String> = releases
        .iter()
        .filter(|(_, n, _)| {
            let p = |r: &str| format!("/repos/{n}/{r}");
            if !raw.ok(&p("contributors")) || (raw.items(&p("contributors")).len() as u64) < c.min_contributors {
                return false;
            }
            let comments_ok = raw
                .items(&p("issues"))
                .iter()
                .filter(|i| i.get("pull_request").is_none() && i["comments"].as_u64().unwrap() > 0)
                .all(|i| raw.ok(&format!("/repos/{n}/issues/{}/comments", i["number"])));
            ["pulls", "issues", "subscribers"].iter().all(|r| raw.ok(&p(r))) && comments_ok
        })
        .map(|(_, n, _)| n.clone())
        .collect();
    Brute {
        counts: [searched, basic.len(), releases.len(), survivors.len()],
        survivors,
    }
}

/// Exact percent in hundredths, rounded half to even, with plain integers.
pub fn hundredths_oracle(part: u64, total: u64) -> u128 {
    if total == 0 {
        return 0;
    }
    let num = part as u128 * 10_000;
    let den = total as u128;
    let (q, r) = (num / den, num % den);
    match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q % 2),
    }
}

pub fn fmt_hundredths(h: u128) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

pub fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ghminer")
}

pub mod analytics_oracle {
    use std::collections::BTreeMap;

    use ghminer::analytics::{contribution_report, user_language_report, Percent};
    use ghminer::model::{classify_languages, Contributor, ProminenceThreshold, UserProfile};
    use num_bigint::BigUint;
    use rand::rngs::StdRng;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    use super::{fmt_hundredths, hundredths_oracle};

    /// part/total*100 == p, checked by cross-multiplication.
    fn exact_matches(p: &Percent, part: u64, total: u64) -> bool {
        let e = p.exact();
        if total == 0 {
            return *e.numer() == 0;
        }
        BigUint::from(*e.numer()) * BigUint::from(total)
            == BigUint::from(*e.denom()) * BigUint::from(part) * BigUint::from(100u32)
    }

    fn rendered_sum_ok(rendered: &[String]) -> Result<(), String> {
        let k = rendered.len() as i128;
        let sum: i128 = rendered
            .iter()
            .map(|s| {
                let (a, b) = s.split_once('.').unwrap();
                a.parse::<i128>().unwrap() * 100 + b.parse::<i128>().unwrap()
            })
            .sum();
        if (sum - 10_000).abs() < k {
            Ok(())
        } else {
            Err(format!("rendered percents {rendered:?} sum to {sum} hundredths"))
        }
    }

    fn contributors(counts: &[u64]) -> Vec<Contributor> {
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| Contributor {
                login: format!("u{i:03}"),
                contributor_id: i as i64,
                commit_count: c,
            })
            .collect()
    }

    fn check_contributions(counts: &[u64], rng: &mut StdRng) -> Result<(), String> {
        let total: u64 = counts.iter().sum();
        let input = contributors(counts);
        let report = contribution_report(&input);
        let by_login: BTreeMap<&str, u64> = input.iter().map(|c| (c.login.as_str(), c.commit_count)).collect();
        for row in &report {
            let part = by_login[row.login.as_str()];
            if !exact_matches(&row.percent, part, total) {
                return Err(format!("{}: exact share wrong for {part}/{total}", row.login));
            }
            let want = fmt_hundredths(hundredths_oracle(part, total));
            if row.percent.to_string() != want {
                return Err(format!("{}: rendered {} want {want}", row.login, row.percent));
            }
        }
        if report.windows(2).any(|w| {
            w[0].commit_count < w[1].commit_count
                || (w[0].commit_count == w[1].commit_count && w[0].login > w[1].login)
        }) {
            return Err("report not sorted by share desc, login asc".into());
        }
        rendered_sum_ok(&report.iter().map(|r| r.percent.to_string()).collect::<Vec<_>>())?;

        let scale = rng.gen_range(2..=1000u64);
        let scaled: Vec<u64> = counts.iter().map(|c| c * scale).collect();
        let pct = |r: &[ghminer::analytics::ContributionShare]| {
            r.iter().map(|x| (x.login.clone(), x.percent)).collect::<Vec<_>>()
        };
        if pct(&contribution_report(&contributors(&scaled))) != pct(&report) {
            return Err(format!("scale by {scale} changed the report"));
        }
        let mut shuffled = input.clone();
        shuffled.shuffle(rng);
        if contribution_report(&shuffled) != report {
            return Err("permuting input changed the report".into());
        }
        Ok(())
    }

    fn profile(repos: &[Vec<(String, u64)>]) -> UserProfile {
        UserProfile {
            login: "p".into(),
            user_id: 1,
            name: String::new(),
            public_repo_count: repos.len() as u64,
            followers: 0,
            repos: vec![],
            repo_languages: repos
                .iter()
                .enumerate()
                .map(|(i, langs)| {
                    let map: BTreeMap<String, u64> = langs.iter().cloned().collect();
                    (format!("p/r{i}"), classify_languages(&map, ProminenceThreshold::DEFAULT))
                })
                .collect(),
        }
    }

    fn check_languages(repos: &[Vec<(String, u64)>], rng: &mut StdRng) -> Result<(), String> {
        let mut totals: BTreeMap<String, u64> = BTreeMap::new();
        for repo in repos {
            for (l, b) in repo {
                *totals.entry(l.clone()).or_default() += b;
            }
        }
        let total: u64 = totals.values().sum();
        let report = user_language_report(&profile(repos));
        if report.len() != totals.len() {
            return Err(format!("{} rows for {} languages", report.len(), totals.len()));
        }
        for row in &report {
            let part = totals[&row.language];
            if row.byte_count != part || !exact_matches(&row.percent, part, total) {
                return Err(format!("{}: wrong share", row.language));
            }
            let want = fmt_hundredths(hundredths_oracle(part, total));
            if row.percent.to_string() != want {
                return Err(format!("{}: rendered {} want {want}", row.language, row.percent));
            }
        }
        rendered_sum_ok(&report.iter().map(|r| r.percent.to_string()).collect::<Vec<_>>())?;

        let scale = rng.gen_range(2..=1000u64);
        let scaled: Vec<Vec<(String, u64)>> = repos
            .iter()
            .map(|r| r.iter().map(|(l, b)| (l.clone(), b * scale)).collect())
            .collect();
        let pct = |r: &[ghminer::analytics::LanguageShare]| {
            r.iter().map(|x| (x.language.clone(), x.percent)).collect::<Vec<_>>()
        };
        if pct(&user_language_report(&profile(&scaled))) != pct(&report) {
            return Err(format!("scale by {scale} changed the report"));
        }
        let mut shuffled = repos.to_vec();
        shuffled.shuffle(rng);
        for r in &mut shuffled {
            r.shuffle(rng);
        }
        if user_language_report(&profile(&shuffled)) != report {
            return Err("permuting input changed the report".into());
        }
        Ok(())
    }

    const LANGS: [&str; 8] = ["C", "C++", "Go", "Java", "Python", "Rust", "Shell", "Zig"];

    /// `cases` random contribution inputs and `cases` random language inputs.
    pub fn run(seed: u64, cases: usize) -> Result<(), String> {
        let mut rng = StdRng::seed_from_u64(seed);
        for case in 0..cases {
            let k = rng.gen_range(1..=12);
            let counts: Vec<u64> = (0..k)
                .map(|_| match rng.gen_range(0..3) {
                    0 => rng.gen_range(1..=3),
                    1 => rng.gen_range(1..=1_000),
                    _ => rng.gen_range(1..=5_000_000),
                })
                .collect();
            check_contributions(&counts, &mut rng).map_err(|e| format!("contributions case {case} {counts:?}: {e}"))?;

            let repos: Vec<Vec<(String, u64)>> = (0..rng.gen_range(1..=5))
                .map(|_| {
                    let mut langs = LANGS.to_vec();
                    langs.shuffle(&mut rng);
                    let n = rng.gen_range(1..=4);
                    langs[..n]
                        .iter()
                        .map(|l| (l.to_string(), rng.gen_range(1..=2_000_000_000u64)))
                        .collect()
                })
                .collect();
            check_languages(&repos, &mut rng).map_err(|e| format!("languages case {case}: {e}"))?;
        }
        Ok(())
    }
}
