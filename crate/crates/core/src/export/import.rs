//! Reads an exported dataset directory back into records.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::model::{
    Contributor, Issue, IssueComment, ItemState, LanguageBreakdown, PullRequest, Release,
    RepositoryRecord, RepositorySummary, Subscriber, Timestamp,
};

use super::tables::{
    TableSchema, CONTRIBUTORS, ISSUES, ISSUE_COMMENTS, LANGUAGES, PULL_REQUESTS, RELEASES,
    REPOSITORIES, SUBSCRIBERS,
};
use super::ExportError;

struct Rows {
    path: PathBuf,
    schema: &'static TableSchema,
    rows: Vec<csv::StringRecord>,
}

impl Rows {
    fn read(dir: &Path, schema: &'static TableSchema) -> Result<Self, ExportError> {
        let path = dir.join(schema.file_name());
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(&path)
            .map_err(|e| ExportError::csv(&path, e))?;
        let header = rdr.headers().map_err(|e| ExportError::csv(&path, e))?.clone();
        if header.iter().collect::<Vec<_>>() != schema.header() {
            return Err(ExportError::Import {
                message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
                path,
            });
        }
        let rows = rdr
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ExportError::csv(&path, e))?;
        Ok(Self { path, schema, rows })
    }
}

struct Row<'r> {
    path: &'r Path,
    schema: &'static TableSchema,
    line: usize,
    record: &'r csv::StringRecord,
}

impl Row<'_> {
    fn fail(&self, column: &str, message: impl std::fmt::Display) -> ExportError {
        ExportError::Import {
            path: self.path.to_path_buf(),
            message: format!("row {}: column {column}: {message}", self.line),
        }
    }

    fn text(&self, column: &str) -> Result<String, ExportError> {
        let idx = self
            .schema
            .column_index(column)
            .ok_or_else(|| self.fail(column, "unknown column"))?;
        Ok(self.record.get(idx).unwrap_or_default().to_string())
    }

    fn parse<T: FromStr>(&self, column: &str) -> Result<T, ExportError>
    where
        T::Err: std::fmt::Display,
    {
        self.text(column)?.parse().map_err(|e| self.fail(column, e))
    }

    fn ts(&self, column: &str) -> Result<Timestamp, ExportError> {
        self.parse(column)
    }

    fn opt_ts(&self, column: &str) -> Result<Option<Timestamp>, ExportError> {
        let raw = self.text(column)?;
        if raw.is_empty() {
            Ok(None)
        } else {
            raw.parse().map(Some).map_err(|e| self.fail(column, e))
        }
    }

    fn state(&self) -> Result<ItemState, ExportError> {
        self.parse("state")
    }
}

fn each<T>(
    rows: &Rows,
    mut f: impl FnMut(&Row<'_>) -> Result<T, ExportError>,
) -> Result<Vec<T>, ExportError> {
    rows.rows
        .iter()
        .enumerate()
        .map(|(i, record)| {
            f(&Row {
                path: &rows.path,
                schema: rows.schema,
                line: i + 2,
                record,
            })
        })
        .collect()
}

fn orphan(path: &Path, repo_id: i64) -> ExportError {
    ExportError::Import {
        path: path.to_path_buf(),
        message: format!("repo_id {repo_id} has no row in repositories.csv"),
    }
}

/// Rebuilds the records of a dataset directory, ordered by repo_id.
pub fn import_csv(dir: &Path) -> Result<Vec<RepositoryRecord>, ExportError> {
    let repos = Rows::read(dir, &REPOSITORIES)?;
    let mut records: BTreeMap<i64, RepositoryRecord> = BTreeMap::new();
    for summary in each(&repos, |r| {
        Ok(RepositorySummary {
            repo_id: r.parse("repo_id")?,
            full_name: r.text("full_name")?,
            owner_login: r.text("owner_login")?,
            stars: r.parse("stars")?,
            forks: r.parse("forks")?,
            watchers: r.parse("watchers")?,
            topic: r.text("topic")?,
            default_branch: r.text("default_branch")?,
            created_at: r.opt_ts("created_at")?,
            description: r.text("description")?,
        })
    })? {
        records.insert(
            summary.repo_id,
            RepositoryRecord {
                summary,
                languages: LanguageBreakdown::default(),
                contributors: vec![],
                releases: vec![],
                pulls: vec![],
                issues: vec![],
                subscribers: vec![],
            },
        );
    }

    macro_rules! child {
        ($schema:expr, $build:expr, $attach:expr) => {{
            let rows = Rows::read(dir, &$schema)?;
            for (repo_id, item) in each(&rows, |r| Ok((r.parse::<i64>("repo_id")?, $build(r)?)))? {
                let rec = records.get_mut(&repo_id).ok_or_else(|| orphan(&rows.path, repo_id))?;
                $attach(rec, item);
            }
        }};
    }

    child!(
        LANGUAGES,
        |r: &Row<'_>| -> Result<(String, u64, bool), ExportError> {
            Ok((r.text("language")?, r.parse("bytes")?, r.parse("prominent")?))
        },
        |rec: &mut RepositoryRecord, (lang, bytes, prominent): (String, u64, bool)| {
            rec.languages.entries.insert(lang.clone(), bytes);
            if prominent {
                rec.languages.prominent.push(lang);
            } else {
                rec.languages.others.push(lang);
            }
        }
    );
    child!(
        CONTRIBUTORS,
        |r: &Row<'_>| -> Result<Contributor, ExportError> {
            Ok(Contributor {
                login: r.text("login")?,
                contributor_id: r.parse("contributor_id")?,
                commit_count: r.parse("commit_count")?,
            })
        },
        |rec: &mut RepositoryRecord, c| rec.contributors.push(c)
    );
    child!(
        RELEASES,
        |r: &Row<'_>| -> Result<Release, ExportError> {
            Ok(Release {
                release_id: r.parse("release_id")?,
                tag: r.text("tag")?,
                name: r.text("name")?,
                published_at: r.ts("published_at")?,
                is_prerelease: r.parse("is_prerelease")?,
            })
        },
        |rec: &mut RepositoryRecord, x| rec.releases.push(x)
    );
    child!(
        PULL_REQUESTS,
        |r: &Row<'_>| -> Result<PullRequest, ExportError> {
            Ok(PullRequest {
                pr_number: r.parse("pr_number")?,
                title: r.text("title")?,
                state: r.state()?,
                author_login: r.text("author_login")?,
                created_at: r.ts("created_at")?,
                merged_at: r.opt_ts("merged_at")?,
            })
        },
        |rec: &mut RepositoryRecord, x| rec.pulls.push(x)
    );
    child!(
        ISSUES,
        |r: &Row<'_>| -> Result<Issue, ExportError> {
            let labels: Vec<String> =
                serde_json::from_str(&r.text("labels")?).map_err(|e| r.fail("labels", e))?;
            Ok(Issue {
                issue_number: r.parse("issue_number")?,
                title: r.text("title")?,
                state: r.state()?,
                author_login: r.text("author_login")?,
                created_at: r.ts("created_at")?,
                labels,
                comment_count: r.parse("comment_count")?,
                comments: vec![],
            })
        },
        |rec: &mut RepositoryRecord, x| rec.issues.push(x)
    );

    let comment_rows = Rows::read(dir, &ISSUE_COMMENTS)?;
    for (repo_id, number, comment) in each(&comment_rows, |r| {
        Ok((
            r.parse::<i64>("repo_id")?,
            r.parse::<u64>("issue_number")?,
            IssueComment {
                comment_id: r.parse("comment_id")?,
                author_login: r.text("author_login")?,
                created_at: r.ts("created_at")?,
                body: r.text("body")?,
            },
        ))
    })? {
        let rec = records
            .get_mut(&repo_id)
            .ok_or_else(|| orphan(&comment_rows.path, repo_id))?;
        let issue = rec
            .issues
            .iter_mut()
            .find(|i| i.issue_number == number)
            .ok_or_else(|| ExportError::Import {
                path: comment_rows.path.clone(),
                message: format!("comment on unknown issue {repo_id}#{number}"),
            })?;
        issue.comments.push(comment);
    }

    child!(
        SUBSCRIBERS,
        |r: &Row<'_>| -> Result<Subscriber, ExportError> {
            Ok(Subscriber {
                login: r.text("login")?,
                user_id: r.parse("user_id")?,
            })
        },
        |rec: &mut RepositoryRecord, x| rec.subscribers.push(x)
    );

    Ok(records.into_values().map(RepositoryRecord::normalize).collect())
}
