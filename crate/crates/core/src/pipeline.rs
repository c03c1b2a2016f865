//! Dataset construction as a three-stage funnel, plus the single-repository
//! and single-user extraction modes.
//!
//! 1. search the topic (stars descending) and keep repositories meeting the
//!    star and fork minima;
//! 2. fetch languages and releases, keep repositories with enough releases;
//! 3. fetch contributors, keep repositories with enough of them, then pull
//!    requests, issues with their comments, and subscribers.
//!
//! Later-stage routes are never requested for a repository that an earlier
//! stage eliminated. Per-repository failures in stages 2 and 3 drop that
//! repository and are recorded as [`Diagnostic`]s; only a failed search
//! aborts a run.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use tracing::{info, warn};

use crate::client::{routes, ApiClient, ApiError, ApiRequest};
use crate::model::{
    self, classify_languages, CommitRecord, Contributor, Issue, LanguageBreakdown,
    ProminenceThreshold, PullRequest, Release, RepositoryRecord, RepositorySummary, SchemaError,
    Subscriber, Timestamp, UserProfile,
};

/// The search API never returns more than this many results for a query.
pub const SEARCH_RESULT_LIMIT: usize = 1000;
pub const DEFAULT_CONCURRENCY: usize = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid criteria: {0}")]
    InvalidCriteria(String),
    #[error(transparent)]
    Api(#[from] ApiError),
    #[error("{context}: {source}")]
    Schema {
        context: String,
        #[source]
        source: SchemaError,
    },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCriteria {
    pub topic: String,
    pub min_stars: u64,
    pub min_forks: u64,
    pub min_releases: u64,
    pub min_contributors: u64,
    /// Upper bound on search results consumed; `None` means unlimited.
    pub max_repos: Option<usize>,
}

impl FilterCriteria {
    /// All filters disabled.
    pub fn new(topic: impl Into<String>) -> Self {
        Self {
            topic: topic.into(),
            min_stars: 0,
            min_forks: 0,
            min_releases: 0,
            min_contributors: 0,
            max_repos: None,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.topic.trim().is_empty() {
            return Err(PipelineError::InvalidCriteria("topic must not be empty".into()));
        }
        if self.max_repos == Some(0) {
            return Err(PipelineError::InvalidCriteria("max_repos must be positive".into()));
        }
        Ok(())
    }

    pub fn passes_basic(&self, s: &RepositorySummary) -> bool {
        s.stars >= self.min_stars && s.forks >= self.min_forks
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunnelCounts {
    pub searched: usize,
    pub after_basic: usize,
    pub after_releases: usize,
    pub after_contributors: usize,
}

impl FunnelCounts {
    pub fn is_monotone(&self) -> bool {
        self.searched >= self.after_basic
            && self.after_basic >= self.after_releases
            && self.after_releases >= self.after_contributors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub full_name: String,
    pub stage: String,
    pub message: String,
}

/// Provenance of one dataset run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub topic: String,
    pub criteria: FilterCriteria,
    pub counts: FunnelCounts,
    pub started_at: Timestamp,
    pub search_capped: bool,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCounts {
    pub searched: usize,
    pub after_basic: usize,
    pub capped: bool,
}

/// A repository that survived stage 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagedRepo {
    pub summary: RepositorySummary,
    pub languages: LanguageBreakdown,
    pub releases: Vec<Release>,
}

enum Outcome<T> {
    Kept(T),
    Filtered,
    Failed(Diagnostic),
}

fn schema(context: impl Into<String>) -> impl FnOnce(SchemaError) -> PipelineError {
    let context = context.into();
    move |source| PipelineError::Schema { context, source }
}

fn parse_all<T>(
    items: &[Value],
    context: &str,
    f: impl Fn(&Value) -> Result<T, SchemaError>,
) -> Result<Vec<T>, PipelineError> {
    items
        .iter()
        .map(|v| f(v).map_err(schema(context)))
        .collect()
}

pub struct Extractor {
    client: Arc<ApiClient>,
    threshold: ProminenceThreshold,
    pool: rayon::ThreadPool,
}

impl Extractor {
    pub fn new(client: Arc<ApiClient>) -> Result<Self, PipelineError> {
        Self::with_concurrency(client, DEFAULT_CONCURRENCY)
    }

    pub fn with_concurrency(client: Arc<ApiClient>, concurrency: usize) -> Result<Self, PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(concurrency.max(1))
            .thread_name(|i| format!("ghminer-fetch-{i}"))
            .build()
            .map_err(|e| PipelineError::Pool(e.to_string()))?;
        Ok(Self {
            client,
            threshold: ProminenceThreshold::DEFAULT,
            pool,
        })
    }

    pub fn with_threshold(mut self, threshold: ProminenceThreshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn client(&self) -> &ApiClient {
        &self.client
    }

    /// Stage 1. Results come back sorted by stars descending with
    /// `full_name` breaking ties.
    pub fn stage1_search(
        &self,
        criteria: &FilterCriteria,
    ) -> Result<(Vec<RepositorySummary>, SearchCounts, Vec<Diagnostic>), PipelineError> {
        criteria.validate()?;
        let cap = criteria
            .max_repos
            .map_or(SEARCH_RESULT_LIMIT, |m| m.min(SEARCH_RESULT_LIMIT));
        let fetched = self
            .client
            .fetch_pages(&routes::search_repositories(&criteria.topic), Some(cap))?;
        let capped = fetched
            .total_count
            .map_or(fetched.truncated && cap == SEARCH_RESULT_LIMIT, |t| {
                t as usize > SEARCH_RESULT_LIMIT
            });

        let mut diagnostics = Vec::new();
        let mut found: Vec<RepositorySummary> = Vec::new();
        for raw in &fetched.items {
            match model::summary_from_raw(raw, &criteria.topic) {
                Ok(s) if found.iter().any(|f| f.repo_id == s.repo_id) => {}
                Ok(s) => found.push(s),
                Err(e) => diagnostics.push(Diagnostic {
                    full_name: raw
                        .get("full_name")
                        .and_then(Value::as_str)
                        .unwrap_or("?")
                        .to_string(),
                    stage: "search".into(),
                    message: e.to_string(),
                }),
            }
        }
        found.sort_by(|a, b| b.stars.cmp(&a.stars).then_with(|| a.full_name.cmp(&b.full_name)));
        let searched = found.len();
        found.retain(|s| criteria.passes_basic(s));
        let counts = SearchCounts {
            searched,
            after_basic: found.len(),
            capped,
        };
        info!(searched, after_basic = counts.after_basic, capped, "stage 1 done");
        Ok((found, counts, diagnostics))
    }

    /// Stage 2: languages and releases; the release minimum applies here.
    pub fn stage2_languages(
        &self,
        repos: Vec<RepositorySummary>,
        criteria: &FilterCriteria,
    ) -> (Vec<StagedRepo>, Vec<Diagnostic>) {
        let outcomes: Vec<Outcome<StagedRepo>> = self.pool.install(|| {
            repos
                .into_par_iter()
                .map(|summary| {
                    let full_name = summary.full_name.clone();
                    match self.languages_and_releases(&summary.full_name) {
                        Ok((_, releases)) if (releases.len() as u64) < criteria.min_releases => {
                            Outcome::Filtered
                        }
                        Ok((languages, releases)) => Outcome::Kept(StagedRepo {
                            summary,
                            languages,
                            releases,
                        }),
                        Err(e) => Outcome::Failed(Diagnostic {
                            full_name,
                            stage: "languages/releases".into(),
                            message: e.to_string(),
                        }),
                    }
                })
                .collect()
        });
        let (kept, diags) = split(outcomes, "stage 2");
        info!(after_releases = kept.len(), "stage 2 done");
        (kept, diags)
    }

    /// Stage 3: contributors first (the contributor minimum applies here),
    /// then the remaining detail routes for survivors only.
    pub fn stage3_details(
        &self,
        staged: Vec<StagedRepo>,
        criteria: &FilterCriteria,
    ) -> (Vec<RepositoryRecord>, Vec<Diagnostic>) {
        let outcomes: Vec<Outcome<RepositoryRecord>> = self.pool.install(|| {
            staged
                .into_par_iter()
                .map(|repo| {
                    let full_name = repo.summary.full_name.clone();
                    let result = self.contributors(&full_name).and_then(|contributors| {
                        if (contributors.len() as u64) < criteria.min_contributors {
                            return Ok(None);
                        }
                        self.finish_record(repo, contributors).map(Some)
                    });
                    match result {
                        Ok(Some(record)) => Outcome::Kept(record),
                        Ok(None) => Outcome::Filtered,
                        Err(e) => Outcome::Failed(Diagnostic {
                            full_name,
                            stage: "details".into(),
                            message: e.to_string(),
                        }),
                    }
                })
                .collect()
        });
        let (kept, diags) = split(outcomes, "stage 3");
        info!(after_contributors = kept.len(), "stage 3 done");
        (kept, diags)
    }

    /// All three stages. Output keeps stage-1 order.
    pub fn run_dataset(
        &self,
        criteria: &FilterCriteria,
    ) -> Result<(Vec<RepositoryRecord>, DatasetManifest), PipelineError> {
        criteria.validate()?;
        let started_at = Timestamp::from_unix(self.client.clock().now_secs())
            .expect("clock within chrono range");
        let (found, search, mut diagnostics) = self.stage1_search(criteria)?;
        let (staged, d2) = self.stage2_languages(found, criteria);
        let after_releases = staged.len();
        let (records, d3) = self.stage3_details(staged, criteria);
        diagnostics.extend(d2);
        diagnostics.extend(d3);
        let manifest = DatasetManifest {
            topic: criteria.topic.clone(),
            criteria: criteria.clone(),
            counts: FunnelCounts {
                searched: search.searched,
                after_basic: search.after_basic,
                after_releases,
                after_contributors: records.len(),
            },
            started_at,
            search_capped: search.capped,
            diagnostics,
        };
        debug_assert!(manifest.counts.is_monotone());
        Ok((records, manifest))
    }

    /// Everything about one repository plus its default-branch history.
    pub fn run_single_repo(
        &self,
        owner: &str,
        name: &str,
    ) -> Result<(RepositoryRecord, Vec<CommitRecord>), PipelineError> {
        let full_name = format!("{owner}/{name}");
        let page = self.client.execute(&routes::repository(&full_name))?;
        let raw = page
            .items
            .first()
            .ok_or_else(|| schema(&full_name)(SchemaError::Missing("id".into())))?;
        let summary = model::summary_from_raw(raw, "").map_err(schema(&full_name))?;
        let full_name = summary.full_name.clone();
        let (languages, releases) = self.languages_and_releases(&full_name)?;
        let contributors = self.contributors(&full_name)?;
        let record = self.finish_record(
            StagedRepo {
                summary,
                languages,
                releases,
            },
            contributors,
        )?;
        let commits = match self.client.fetch_all(&routes::commits(&full_name), None) {
            Ok(items) => parse_all(&items, &format!("{full_name} commits"), model::commit_from_raw)?,
            // an empty repository answers 409 on the commits route
            Err(e) if e.status() == Some(409) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        Ok((record, commits))
    }

    /// Profile, repositories and per-repository language breakdowns.
    pub fn run_single_user(&self, login: &str) -> Result<UserProfile, PipelineError> {
        let page = self.client.execute(&routes::user(login))?;
        let raw = page
            .items
            .first()
            .ok_or_else(|| schema(login)(SchemaError::Missing("login".into())))?;
        let user = model::user_from_raw(raw).map_err(schema(login))?;
        let items = self.client.fetch_all(&routes::user_repos(&user.login), None)?;
        let repos = parse_all(&items, &format!("{login} repos"), |v| model::summary_from_raw(v, ""))?;
        let breakdowns: Result<Vec<_>, PipelineError> = self.pool.install(|| {
            repos
                .par_iter()
                .map(|r| Ok((r.full_name.clone(), self.languages(&r.full_name)?)))
                .collect()
        });
        Ok(UserProfile {
            login: user.login,
            user_id: user.user_id,
            name: user.name,
            public_repo_count: user.public_repo_count,
            followers: user.followers,
            repos,
            repo_languages: breakdowns?.into_iter().collect(),
        })
    }

    fn languages(&self, full_name: &str) -> Result<LanguageBreakdown, PipelineError> {
        let page = self.client.execute(&routes::languages(full_name))?;
        let entries = match page.items.first() {
            Some(raw) => model::language_map_from_raw(raw).map_err(schema(format!("{full_name} languages")))?,
            None => Default::default(),
        };
        Ok(classify_languages(&entries, self.threshold))
    }

    fn languages_and_releases(
        &self,
        full_name: &str,
    ) -> Result<(LanguageBreakdown, Vec<Release>), PipelineError> {
        let languages = self.languages(full_name)?;
        let releases = self.list(routes::releases(full_name), full_name, "releases", model::release_from_raw)?;
        Ok((languages, releases))
    }

    fn contributors(&self, full_name: &str) -> Result<Vec<Contributor>, PipelineError> {
        self.list(routes::contributors(full_name), full_name, "contributors", model::contributor_from_raw)
    }

    fn list<T>(
        &self,
        req: ApiRequest,
        full_name: &str,
        what: &str,
        f: impl Fn(&Value) -> Result<T, SchemaError>,
    ) -> Result<Vec<T>, PipelineError> {
        let items = self.client.fetch_all(&req, None)?;
        parse_all(&items, &format!("{full_name} {what}"), f)
    }

    fn finish_record(
        &self,
        repo: StagedRepo,
        contributors: Vec<Contributor>,
    ) -> Result<RepositoryRecord, PipelineError> {
        let full_name = repo.summary.full_name.clone();
        let pulls: Vec<PullRequest> =
            self.list(routes::pulls(&full_name), &full_name, "pulls", model::pull_from_raw)?;
        let raw_issues = self.client.fetch_all(&routes::issues(&full_name), None)?;
        let mut issues: Vec<Issue> = Vec::new();
        for raw in raw_issues.iter().filter(|r| !model::issue_is_pull_request(r)) {
            let mut issue = model::issue_from_raw(raw).map_err(schema(format!("{full_name} issues")))?;
            if issue.comment_count > 0 {
                let comments = self.list(
                    routes::issue_comments(&full_name, issue.issue_number),
                    &full_name,
                    "issue comments",
                    model::comment_from_raw,
                )?;
                issue.attach_comments(comments);
            }
            issues.push(issue);
        }
        let subscribers: Vec<Subscriber> = self.list(
            routes::subscribers(&full_name),
            &full_name,
            "subscribers",
            model::subscriber_from_raw,
        )?;
        Ok(RepositoryRecord {
            summary: repo.summary,
            languages: repo.languages,
            contributors,
            releases: repo.releases,
            pulls,
            issues,
            subscribers,
        }
        .normalize())
    }
}

fn split<T>(outcomes: Vec<Outcome<T>>, stage: &str) -> (Vec<T>, Vec<Diagnostic>) {
    let mut kept = Vec::new();
    let mut diags = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Kept(t) => kept.push(t),
            Outcome::Filtered => {}
            Outcome::Failed(d) => {
                warn!(repo = %d.full_name, error = %d.message, "{stage}: dropping repository");
                diags.push(d);
            }
        }
    }
    (kept, diags)
}
