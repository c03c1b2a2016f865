//! Mapping from raw API JSON to typed records.
//!
//! Required fields that are absent (or `null`) produce
//! [`SchemaError::Missing`] with the dotted field path; optional text
//! becomes empty and optional counters become zero.

use std::collections::BTreeMap;

use serde_json::Value;

use super::{
    Contributor, CommitRecord, Issue, IssueComment, ItemState, PullRequest, Release,
    RepositorySummary, SchemaError, Subscriber, Timestamp,
};

fn lookup<'a>(raw: &'a Value, path: &str) -> Option<&'a Value> {
    let mut cur = raw;
    for part in path.split('.') {
        cur = cur.get(part)?;
    }
    (!cur.is_null()).then_some(cur)
}

fn req<'a>(raw: &'a Value, path: &str) -> Result<&'a Value, SchemaError> {
    lookup(raw, path).ok_or_else(|| SchemaError::Missing(path.to_string()))
}

fn req_i64(raw: &Value, path: &str) -> Result<i64, SchemaError> {
    req(raw, path)?
        .as_i64()
        .ok_or_else(|| SchemaError::invalid(path, "expected an integer"))
}

fn req_u64(raw: &Value, path: &str) -> Result<u64, SchemaError> {
    req(raw, path)?
        .as_u64()
        .ok_or_else(|| SchemaError::invalid(path, "expected a non-negative integer"))
}

fn req_str<'a>(raw: &'a Value, path: &str) -> Result<&'a str, SchemaError> {
    req(raw, path)?
        .as_str()
        .ok_or_else(|| SchemaError::invalid(path, "expected a string"))
}

fn opt_str(raw: &Value, path: &str) -> String {
    lookup(raw, path)
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string()
}

fn opt_u64(raw: &Value, path: &str) -> u64 {
    lookup(raw, path).and_then(Value::as_u64).unwrap_or(0)
}

fn parse_ts(path: &str, s: &str) -> Result<Timestamp, SchemaError> {
    Timestamp::parse(s).map_err(|e| SchemaError::invalid(path, e.to_string()))
}

fn req_ts(raw: &Value, path: &str) -> Result<Timestamp, SchemaError> {
    parse_ts(path, req_str(raw, path)?)
}

fn opt_ts(raw: &Value, path: &str) -> Result<Option<Timestamp>, SchemaError> {
    match lookup(raw, path).and_then(Value::as_str) {
        Some(s) => parse_ts(path, s).map(Some),
        None => Ok(None),
    }
}

fn req_state(raw: &Value) -> Result<ItemState, SchemaError> {
    req_str(raw, "state")?.parse()
}

pub fn summary_from_raw(raw: &Value, topic: &str) -> Result<RepositorySummary, SchemaError> {
    let repo_id = req_i64(raw, "id")?;
    let full_name = req_str(raw, "full_name")?;
    let owner_login = req_str(raw, "owner.login")?;
    let stars = req_u64(raw, "stargazers_count")?;
    let forks = req_u64(raw, "forks_count")?;
    if full_name.matches('/').count() != 1
        || full_name.starts_with('/')
        || full_name.ends_with('/')
    {
        return Err(SchemaError::invalid(
            "full_name",
            format!("expected owner/name, got {full_name:?}"),
        ));
    }
    Ok(RepositorySummary {
        repo_id,
        full_name: full_name.to_string(),
        owner_login: owner_login.to_string(),
        stars,
        forks,
        watchers: opt_u64(raw, "watchers_count"),
        topic: topic.to_string(),
        default_branch: opt_str(raw, "default_branch"),
        created_at: opt_ts(raw, "created_at")?,
        description: opt_str(raw, "description"),
    })
}

pub fn language_map_from_raw(raw: &Value) -> Result<BTreeMap<String, u64>, SchemaError> {
    let obj = raw
        .as_object()
        .ok_or_else(|| SchemaError::invalid("languages", "expected an object"))?;
    obj.iter()
        .map(|(lang, bytes)| {
            bytes
                .as_u64()
                .map(|b| (lang.clone(), b))
                .ok_or_else(|| SchemaError::invalid(lang, "byte count must be a non-negative integer"))
        })
        .collect()
}

pub fn contributor_from_raw(raw: &Value) -> Result<Contributor, SchemaError> {
    let login = req_str(raw, "login")?.to_string();
    let contributor_id = req_i64(raw, "id")?;
    let commit_count = req_u64(raw, "contributions")?;
    if commit_count == 0 {
        return Err(SchemaError::invalid("contributions", "must be at least 1"));
    }
    Ok(Contributor {
        login,
        contributor_id,
        commit_count,
    })
}

/// Drafts have no `published_at`; their creation time stands in.
pub fn release_from_raw(raw: &Value) -> Result<Release, SchemaError> {
    let release_id = req_i64(raw, "id")?;
    let tag = req_str(raw, "tag_name")?.to_string();
    let published_at = match lookup(raw, "published_at") {
        Some(_) => req_ts(raw, "published_at")?,
        None => req_ts(raw, "created_at").map_err(|_| SchemaError::Missing("published_at".into()))?,
    };
    Ok(Release {
        release_id,
        tag,
        name: opt_str(raw, "name"),
        published_at,
        is_prerelease: lookup(raw, "prerelease").and_then(Value::as_bool).unwrap_or(false),
    })
}

pub fn pull_from_raw(raw: &Value) -> Result<PullRequest, SchemaError> {
    let pr_number = req_u64(raw, "number")?;
    let title = req_str(raw, "title")?.to_string();
    let state = req_state(raw)?;
    let created_at = req_ts(raw, "created_at")?;
    let merged_at = opt_ts(raw, "merged_at")?;
    if merged_at.is_some_and(|m| m < created_at) {
        return Err(SchemaError::invalid("merged_at", "earlier than created_at"));
    }
    Ok(PullRequest {
        pr_number,
        title,
        state,
        author_login: opt_str(raw, "user.login"),
        created_at,
        merged_at,
    })
}

/// The issues route also lists pull requests; those carry a
/// `pull_request` object.
pub fn issue_is_pull_request(raw: &Value) -> bool {
    lookup(raw, "pull_request").is_some()
}

/// Builds an issue without its comment thread; `comment_count` is the
/// API's counter until comments are attached.
pub fn issue_from_raw(raw: &Value) -> Result<Issue, SchemaError> {
    if issue_is_pull_request(raw) {
        return Err(SchemaError::invalid("pull_request", "record is a pull request"));
    }
    let issue_number = req_u64(raw, "number")?;
    let title = req_str(raw, "title")?.to_string();
    let state = req_state(raw)?;
    let created_at = req_ts(raw, "created_at")?;
    let labels = match lookup(raw, "labels") {
        Some(Value::Array(items)) => items
            .iter()
            .map(|l| match l {
                Value::String(s) => Ok(s.clone()),
                other => other
                    .get("name")
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| SchemaError::Missing("labels.name".into())),
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(SchemaError::invalid("labels", "expected an array")),
        None => Vec::new(),
    };
    Ok(Issue {
        issue_number,
        title,
        state,
        author_login: opt_str(raw, "user.login"),
        created_at,
        labels,
        comment_count: opt_u64(raw, "comments"),
        comments: Vec::new(),
    })
}

pub fn comment_from_raw(raw: &Value) -> Result<IssueComment, SchemaError> {
    Ok(IssueComment {
        comment_id: req_i64(raw, "id")?,
        author_login: opt_str(raw, "user.login"),
        created_at: req_ts(raw, "created_at")?,
        body: opt_str(raw, "body"),
    })
}

pub fn subscriber_from_raw(raw: &Value) -> Result<Subscriber, SchemaError> {
    Ok(Subscriber {
        login: req_str(raw, "login")?.to_string(),
        user_id: req_i64(raw, "id")?,
    })
}

pub fn commit_from_raw(raw: &Value) -> Result<CommitRecord, SchemaError> {
    let sha = req_str(raw, "sha")?;
    if sha.len() != 40 || !sha.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(SchemaError::invalid("sha", format!("not a 40-hex object id: {sha:?}")));
    }
    Ok(CommitRecord {
        sha: sha.to_string(),
        author_login: opt_str(raw, "author.login"),
        authored_at: req_ts(raw, "commit.author.date")?,
        message: opt_str(raw, "commit.message"),
    })
}

/// Account fields of a `/users/{login}` response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawUser {
    pub login: String,
    pub user_id: i64,
    pub name: String,
    pub public_repo_count: u64,
    pub followers: u64,
}

pub fn user_from_raw(raw: &Value) -> Result<RawUser, SchemaError> {
    Ok(RawUser {
        login: req_str(raw, "login")?.to_string(),
        user_id: req_i64(raw, "id")?,
        name: opt_str(raw, "name"),
        public_repo_count: opt_u64(raw, "public_repos"),
        followers: opt_u64(raw, "followers"),
    })
}
