//! Authoring of GitHub-shaped fixture sets without network access.
//!
//! [`FixtureBuilder`] paginates item lists exactly the way the API does
//! (100 per page, `Link: rel="next"` on every page but the last) and keys
//! each page with the same route table the extractor uses. [`RepoSpec`] and
//! [`UserSpec`] generate deterministic repository and user payloads from a
//! handful of counts.

use std::collections::HashMap;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::client::{routes, ApiRequest, HttpResponse, MAX_PER_PAGE};

use super::FixtureEntry;

const LINK_BASE: &str = "https://api.github.com";

#[derive(Debug, Clone)]
pub struct FixtureBuilder {
    entries: Vec<FixtureEntry>,
    counters: HashMap<String, u32>,
    per_page: u32,
    rate: Option<(u64, i64)>,
}

impl Default for FixtureBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl FixtureBuilder {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            counters: HashMap::new(),
            per_page: MAX_PER_PAGE,
            rate: None,
        }
    }

    /// Stamps `x-ratelimit-remaining`/`x-ratelimit-reset` on later entries.
    pub fn with_rate_headers(mut self, remaining: u64, reset: i64) -> Self {
        self.rate = Some((remaining, reset));
        self
    }

    pub fn per_page(&self) -> u32 {
        self.per_page
    }

    /// Appends a raw response for `req`; repeated keys get increasing
    /// sequence indices.
    pub fn push(&mut self, req: &ApiRequest, status: u16, headers: &[(&str, String)], body: Vec<u8>) {
        let key = req.request_line();
        let seq = self.counters.entry(key.clone()).or_default();
        let mut resp = HttpResponse {
            status,
            headers: headers
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            body,
        };
        if let Some((remaining, reset)) = self.rate {
            resp.headers
                .entry("x-ratelimit-remaining".into())
                .or_insert_with(|| remaining.to_string());
            resp.headers
                .entry("x-ratelimit-reset".into())
                .or_insert_with(|| reset.to_string());
        }
        self.entries.push(FixtureEntry::new(key, *seq, &resp));
        *seq += 1;
    }

    pub fn json(&mut self, req: ApiRequest, status: u16, body: &Value) {
        self.push(&req, status, &[], body.to_string().into_bytes());
    }

    /// Splits `items` into API pages. An empty list still yields one `[]`
    /// page.
    pub fn paginated(&mut self, req: ApiRequest, items: &[Value]) {
        self.pages(req, items, |chunk| Value::Array(chunk.to_vec()));
    }

    /// Search responses wrap each page in `{total_count, incomplete_results, items}`.
    pub fn search(&mut self, topic: &str, items: &[Value], total_count: Option<u64>) {
        let total = total_count.unwrap_or(items.len() as u64);
        self.pages(routes::search_repositories(topic), items, |chunk| {
            json!({"total_count": total, "incomplete_results": false, "items": chunk})
        });
    }

    fn pages(&mut self, req: ApiRequest, items: &[Value], wrap: impl Fn(&[Value]) -> Value) {
        let per_page = self.per_page as usize;
        let chunks: Vec<&[Value]> = if items.is_empty() {
            vec![&[]]
        } else {
            items.chunks(per_page).collect()
        };
        let last = chunks.len();
        for (i, chunk) in chunks.into_iter().enumerate() {
            let page_no = i as u32 + 1;
            let page_req = req.clone().with_page(page_no);
            let mut headers = Vec::new();
            if (page_no as usize) < last {
                let link = |n: u32| {
                    let r = req.clone().with_page(n);
                    format!("{LINK_BASE}{}", r.request_line().trim_start_matches("GET "))
                };
                headers.push((
                    "link",
                    format!(
                        "<{}>; rel=\"next\", <{}>; rel=\"last\"",
                        link(page_no + 1),
                        link(last as u32)
                    ),
                ));
            }
            self.push(&page_req, 200, &headers, wrap(chunk).to_string().into_bytes());
        }
    }

    pub fn entries(&self) -> &[FixtureEntry] {
        &self.entries
    }

    pub fn build(self) -> Vec<FixtureEntry> {
        self.entries
    }
}

fn fake_sha(seed: &str) -> String {
    hex::encode(Sha256::digest(seed.as_bytes()))[..40].to_string()
}

fn day(offset: i64) -> String {
    // 2016-01-01T00:00:00Z
    crate::model::Timestamp::from_unix(1_451_606_400 + offset * 86_400)
        .expect("in range")
        .to_string()
}

/// A synthetic repository described by counts. Every generated id, login
/// and timestamp is a pure function of `id` and the position in its list.
#[derive(Debug, Clone, Default)]
pub struct RepoSpec {
    pub id: i64,
    pub owner: String,
    pub name: String,
    pub stars: u64,
    pub forks: u64,
    pub description: String,
    pub languages: Vec<(String, u64)>,
    pub releases: usize,
    /// Commit count per contributor.
    pub contributors: Vec<u64>,
    pub pulls: usize,
    /// Comment count per plain issue.
    pub issue_comments: Vec<usize>,
    /// How many of the pulls also show up on the issues route.
    pub pr_marked_issues: usize,
    pub subscribers: usize,
    pub commits: usize,
    /// Route kinds (see [`routes::route_kind`]) answered with this status
    /// instead of data.
    pub failures: Vec<(&'static str, u16)>,
}

impl RepoSpec {
    pub fn new(id: i64, owner: &str, name: &str) -> Self {
        Self {
            id,
            owner: owner.into(),
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn full_name(&self) -> String {
        format!("{}/{}", self.owner, self.name)
    }

    fn owner_id(&self) -> i64 {
        // stable per owner login
        let digest = Sha256::digest(self.owner.as_bytes());
        1_000 + (u16::from_be_bytes([digest[0], digest[1]]) as i64)
    }

    pub fn repo_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "full_name": self.full_name(),
            "private": false,
            "owner": {"login": self.owner, "id": self.owner_id(), "type": "User"},
            "html_url": format!("https://github.com/{}", self.full_name()),
            "description": if self.description.is_empty() { Value::Null } else { json!(self.description) },
            "fork": false,
            "created_at": day(self.id % 1000),
            "stargazers_count": self.stars,
            "watchers_count": self.stars,
            "forks_count": self.forks,
            "default_branch": "main",
            "language": self.languages.first().map(|(l, _)| l.clone()),
        })
    }

    fn failure(&self, kind: &str) -> Option<u16> {
        self.failures.iter().find(|(k, _)| *k == kind).map(|(_, s)| *s)
    }

    fn list(&self, b: &mut FixtureBuilder, kind: &str, req: ApiRequest, items: &[Value]) {
        match self.failure(kind) {
            Some(status) => b.json(req, status, &json!({"message": "synthetic failure"})),
            None => b.paginated(req, items),
        }
    }

    pub fn language_json(&self) -> Value {
        Value::Object(
            self.languages
                .iter()
                .map(|(l, n)| (l.clone(), json!(n)))
                .collect(),
        )
    }

    pub fn release_items(&self) -> Vec<Value> {
        // newest first, as the API lists them
        (0..self.releases)
            .rev()
            .map(|i| {
                json!({
                    "id": self.id * 10_000 + i as i64,
                    "tag_name": format!("v{}.{}.0", i / 10, i % 10),
                    "name": if i % 4 == 3 { Value::Null } else { json!(format!("Release {i}")) },
                    "draft": false,
                    "prerelease": i % 3 == 2,
                    "created_at": day(100 + i as i64),
                    "published_at": day(100 + i as i64),
                })
            })
            .collect()
    }

    pub fn contributor_items(&self) -> Vec<Value> {
        let mut items: Vec<(usize, u64)> = self.contributors.iter().copied().enumerate().collect();
        // the API orders by contributions, descending
        items.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        items
            .into_iter()
            .map(|(i, commits)| {
                json!({
                    "login": format!("dev{}-{}", self.id, i),
                    "id": self.id * 1_000 + i as i64,
                    "type": "User",
                    "contributions": commits,
                })
            })
            .collect()
    }

    fn pull_json(&self, n: usize) -> Value {
        let number = n as u64 + 1;
        json!({
            "number": number,
            "title": format!("Change #{number} for {}", self.name),
            "state": match n % 3 { 0 => "open", _ => "closed" },
            "user": {"login": format!("dev{}-{}", self.id, n % 3)},
            "created_at": day(200 + n as i64),
            "merged_at": if n % 3 == 1 { json!(day(201 + n as i64)) } else { Value::Null },
        })
    }

    pub fn pull_items(&self) -> Vec<Value> {
        (0..self.pulls).rev().map(|n| self.pull_json(n)).collect()
    }

    pub fn issue_number(&self, i: usize) -> u64 {
        (self.pulls + i + 1) as u64
    }

    pub fn issue_items(&self) -> Vec<Value> {
        let mut items: Vec<(u64, Value)> = self
            .issue_comments
            .iter()
            .enumerate()
            .map(|(i, &comments)| {
                let number = self.issue_number(i);
                let title = match i % 3 {
                    0 => format!("Crash when parsing \"a, b\" in {}", self.name),
                    1 => format!("Docs: clarify option {i}"),
                    _ => format!("Feature request {i}"),
                };
                let labels: Vec<Value> = match i % 3 {
                    0 => vec![json!({"name": "bug"}), json!({"name": "help wanted"})],
                    1 => vec![json!({"name": "docs"})],
                    _ => vec![],
                };
                let issue = json!({
                    "number": number,
                    "title": title,
                    "state": if i % 2 == 0 { "open" } else { "closed" },
                    "user": {"login": format!("reporter{}", i % 4)},
                    "labels": labels,
                    "comments": comments,
                    "created_at": day(300 + i as i64),
                });
                (number, issue)
            })
            .collect();
        for n in 0..self.pr_marked_issues.min(self.pulls) {
            let mut pr = self.pull_json(n);
            pr["pull_request"] = json!({"url": format!("{LINK_BASE}/repos/{}/pulls/{}", self.full_name(), n + 1)});
            pr["labels"] = json!([]);
            pr["comments"] = json!(0);
            items.push((n as u64 + 1, pr));
        }
        // newest first
        items.sort_by_key(|(n, _)| std::cmp::Reverse(*n));
        items.into_iter().map(|(_, v)| v).collect()
    }

    pub fn comment_items(&self, i: usize) -> Vec<Value> {
        let number = self.issue_number(i);
        (0..self.issue_comments[i])
            .map(|c| {
                let body = match c % 3 {
                    0 => format!("Reproduced on {}.\nSteps:\n1. run it\n2. see \"error\", then exit", self.name),
                    1 => "Thanks, fixed in main ✓".to_string(),
                    _ => format!("+1 ({number}/{c})"),
                };
                json!({
                    "id": self.id * 100_000 + number as i64 * 100 + c as i64,
                    "user": {"login": format!("commenter{}", c % 5)},
                    "created_at": day(400 + c as i64),
                    "body": body,
                })
            })
            .collect()
    }

    pub fn subscriber_items(&self) -> Vec<Value> {
        (0..self.subscribers)
            .map(|s| json!({"login": format!("watcher{s}"), "id": 50_000 + s as i64}))
            .collect()
    }

    pub fn commit_items(&self) -> Vec<Value> {
        (0..self.commits)
            .map(|c| {
                let author = if c % 4 == 3 {
                    Value::Null
                } else {
                    json!({"login": format!("dev{}-{}", self.id, c % 2)})
                };
                json!({
                    "sha": fake_sha(&format!("{}:{c}", self.full_name())),
                    "author": author,
                    "commit": {
                        "author": {"name": "Someone", "date": day(500 - c as i64)},
                        "message": format!("Commit {c}\n\nBody line for {}", self.name),
                    },
                })
            })
            .collect()
    }

    /// Registers the repository route plus every detail route.
    pub fn register(&self, b: &mut FixtureBuilder) {
        let full = self.full_name();
        match self.failure("repository") {
            Some(status) => b.json(routes::repository(&full), status, &json!({"message": "synthetic failure"})),
            None => b.json(routes::repository(&full), 200, &self.repo_json()),
        }
        self.register_languages(b);
        self.list(b, "releases", routes::releases(&full), &self.release_items());
        self.list(b, "contributors", routes::contributors(&full), &self.contributor_items());
        self.list(b, "pulls", routes::pulls(&full), &self.pull_items());
        self.list(b, "issues", routes::issues(&full), &self.issue_items());
        for (i, &count) in self.issue_comments.iter().enumerate() {
            if count > 0 {
                let req = routes::issue_comments(&full, self.issue_number(i));
                self.list(b, "issue_comments", req, &self.comment_items(i));
            }
        }
        self.list(b, "subscribers", routes::subscribers(&full), &self.subscriber_items());
        self.list(b, "commits", routes::commits(&full), &self.commit_items());
    }

    pub fn register_languages(&self, b: &mut FixtureBuilder) {
        let req = routes::languages(&self.full_name());
        match self.failure("languages") {
            Some(status) => b.json(req, status, &json!({"message": "synthetic failure"})),
            None => b.json(req, 200, &self.language_json()),
        }
    }
}

/// Registers a search result for `topic` plus detail routes for each repo.
pub fn register_dataset(b: &mut FixtureBuilder, topic: &str, repos: &[RepoSpec]) {
    let mut ordered: Vec<&RepoSpec> = repos.iter().collect();
    ordered.sort_by_key(|r| std::cmp::Reverse(r.stars));
    let items: Vec<Value> = ordered.iter().map(|r| r.repo_json()).collect();
    b.search(topic, &items, None);
    for r in repos {
        r.register(b);
    }
}

#[derive(Debug, Clone, Default)]
pub struct UserSpec {
    pub login: String,
    pub id: i64,
    pub name: String,
    pub followers: u64,
    pub repos: Vec<RepoSpec>,
}

impl UserSpec {
    pub fn user_json(&self) -> Value {
        json!({
            "login": self.login,
            "id": self.id,
            "name": if self.name.is_empty() { Value::Null } else { json!(self.name) },
            "public_repos": self.repos.len(),
            "followers": self.followers,
            "type": "User",
        })
    }

    pub fn register(&self, b: &mut FixtureBuilder) {
        b.json(routes::user(&self.login), 200, &self.user_json());
        let items: Vec<Value> = self.repos.iter().map(RepoSpec::repo_json).collect();
        b.paginated(routes::user_repos(&self.login), &items);
        for r in &self.repos {
            r.register_languages(b);
        }
    }
}
