//! Dataset schema: one [`RepositoryRecord`] per repository with its nested
//! detail collections, plus the single-user [`UserProfile`].
//!
//! Nested collections are kept sorted by their natural key (see
//! [`RepositoryRecord::normalize`]) so that export order and in-memory
//! order agree.

mod language;
mod raw;
mod timestamp;

pub use language::{classify_languages, LanguageBreakdown, ProminenceThreshold};
pub use raw::{
    comment_from_raw, commit_from_raw, contributor_from_raw, issue_from_raw, issue_is_pull_request,
    language_map_from_raw, pull_from_raw, release_from_raw, subscriber_from_raw,
    summary_from_raw, user_from_raw, RawUser,
};
pub use timestamp::Timestamp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("missing required field `{0}`")]
    Missing(String),
    #[error("field `{field}` is invalid: {reason}")]
    Invalid { field: String, reason: String },
}

impl SchemaError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        SchemaError::Invalid {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemState {
    Open,
    Closed,
}

impl ItemState {
    pub fn as_str(&self) -> &'static str {
        match self {
            ItemState::Open => "open",
            ItemState::Closed => "closed",
        }
    }
}

impl fmt::Display for ItemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ItemState {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open" => Ok(ItemState::Open),
            "closed" => Ok(ItemState::Closed),
            other => Err(SchemaError::invalid("state", format!("unknown state {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepositorySummary {
    pub repo_id: i64,
    /// `owner/name`
    pub full_name: String,
    pub owner_login: String,
    pub stars: u64,
    pub forks: u64,
    pub watchers: u64,
    /// Search topic that surfaced the repository; empty outside dataset runs.
    pub topic: String,
    pub default_branch: String,
    pub created_at: Option<Timestamp>,
    pub description: String,
}

impl RepositorySummary {
    pub fn owner_and_name(&self) -> (&str, &str) {
        self.full_name
            .split_once('/')
            .expect("full_name validated to contain one '/'")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contributor {
    pub login: String,
    pub contributor_id: i64,
    /// Contributions counted by the API; at least one.
    pub commit_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub release_id: i64,
    pub tag: String,
    pub name: String,
    pub published_at: Timestamp,
    pub is_prerelease: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullRequest {
    pub pr_number: u64,
    pub title: String,
    pub state: ItemState,
    pub author_login: String,
    pub created_at: Timestamp,
    pub merged_at: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueComment {
    pub comment_id: i64,
    pub author_login: String,
    pub created_at: Timestamp,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub issue_number: u64,
    pub title: String,
    pub state: ItemState,
    pub author_login: String,
    pub created_at: Timestamp,
    pub labels: Vec<String>,
    pub comment_count: u64,
    pub comments: Vec<IssueComment>,
}

impl Issue {
    /// Installs the fetched thread; `comment_count` follows what was fetched.
    pub fn attach_comments(&mut self, mut comments: Vec<IssueComment>) {
        comments.sort_by_key(|c| c.comment_id);
        self.comment_count = comments.len() as u64;
        self.comments = comments;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subscriber {
    pub login: String,
    pub user_id: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub sha: String,
    /// Empty when the commit author has no linked account.
    pub author_login: String,
    pub authored_at: Timestamp,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepositoryRecord {
    pub summary: RepositorySummary,
    pub languages: LanguageBreakdown,
    pub contributors: Vec<Contributor>,
    pub releases: Vec<Release>,
    pub pulls: Vec<PullRequest>,
    pub issues: Vec<Issue>,
    pub subscribers: Vec<Subscriber>,
}

impl RepositoryRecord {
    /// Sorts every nested collection by its natural key and drops duplicate
    /// subscribers.
    pub fn normalize(mut self) -> Self {
        self.contributors.sort_by_key(|c| c.contributor_id);
        self.releases.sort_by_key(|r| r.release_id);
        self.pulls.sort_by_key(|p| p.pr_number);
        self.issues.sort_by_key(|i| i.issue_number);
        for issue in &mut self.issues {
            issue.comments.sort_by_key(|c| c.comment_id);
        }
        self.subscribers.sort_by_key(|s| s.user_id);
        self.subscribers
            .dedup_by(|a, b| a.user_id == b.user_id && a.login == b.login);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub login: String,
    pub user_id: i64,
    pub name: String,
    pub public_repo_count: u64,
    pub followers: u64,
    pub repos: Vec<RepositorySummary>,
    /// Keyed by repository `full_name`.
    pub repo_languages: BTreeMap<String, LanguageBreakdown>,
}
