//! Table layouts shared by the CSV and SQLite writers. Each table is built
//! once as typed cells; both formats render from the same rows.

use crate::analytics::{user_language_report, LanguageShare};
use crate::model::{CommitRecord, RepositoryRecord, RepositorySummary, Timestamp, UserProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Integer,
    Text,
    Bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub ty: ColumnType,
    pub nullable: bool,
}

const fn int(name: &'static str) -> Column {
    Column { name, ty: ColumnType::Integer, nullable: false }
}
const fn text(name: &'static str) -> Column {
    Column { name, ty: ColumnType::Text, nullable: false }
}
const fn opt_text(name: &'static str) -> Column {
    Column { name, ty: ColumnType::Text, nullable: true }
}
const fn boolean(name: &'static str) -> Column {
    Column { name, ty: ColumnType::Bool, nullable: false }
}

/// A foreign key from `columns` of this table to `target(target_columns)`.
#[derive(Debug, Clone, Copy)]
pub struct ForeignKey {
    pub columns: &'static [&'static str],
    pub target: &'static str,
    pub target_columns: &'static [&'static str],
}

#[derive(Debug)]
pub struct TableSchema {
    pub name: &'static str,
    pub columns: &'static [Column],
    pub primary_key: &'static [&'static str],
    pub foreign_keys: &'static [ForeignKey],
}

impl TableSchema {
    pub fn header(&self) -> Vec<&'static str> {
        self.columns.iter().map(|c| c.name).collect()
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}

const REPO_FK: ForeignKey = ForeignKey {
    columns: &["repo_id"],
    target: "repositories",
    target_columns: &["repo_id"],
};

const SUMMARY_COLUMNS: &[Column] = &[
    int("repo_id"),
    text("full_name"),
    text("owner_login"),
    int("stars"),
    int("forks"),
    int("watchers"),
    text("topic"),
    text("default_branch"),
    opt_text("created_at"),
    text("description"),
];

pub static REPOSITORIES: TableSchema = TableSchema {
    name: "repositories",
    columns: SUMMARY_COLUMNS,
    primary_key: &["repo_id"],
    foreign_keys: &[],
};

pub static LANGUAGES: TableSchema = TableSchema {
    name: "languages",
    columns: &[int("repo_id"), text("language"), int("bytes"), boolean("prominent")],
    primary_key: &["repo_id", "language"],
    foreign_keys: &[REPO_FK],
};

pub static CONTRIBUTORS: TableSchema = TableSchema {
    name: "contributors",
    columns: &[int("repo_id"), int("contributor_id"), text("login"), int("commit_count")],
    primary_key: &["repo_id", "contributor_id"],
    foreign_keys: &[REPO_FK],
};

pub static RELEASES: TableSchema = TableSchema {
    name: "releases",
    columns: &[
        int("repo_id"),
        int("release_id"),
        text("tag"),
        text("name"),
        text("published_at"),
        boolean("is_prerelease"),
    ],
    primary_key: &["repo_id", "release_id"],
    foreign_keys: &[REPO_FK],
};

pub static PULL_REQUESTS: TableSchema = TableSchema {
    name: "pull_requests",
    columns: &[
        int("repo_id"),
        int("pr_number"),
        text("title"),
        text("state"),
        text("author_login"),
        text("created_at"),
        opt_text("merged_at"),
    ],
    primary_key: &["repo_id", "pr_number"],
    foreign_keys: &[REPO_FK],
};

pub static ISSUES: TableSchema = TableSchema {
    name: "issues",
    columns: &[
        int("repo_id"),
        int("issue_number"),
        text("title"),
        text("state"),
        text("author_login"),
        text("created_at"),
        text("labels"),
        int("comment_count"),
    ],
    primary_key: &["repo_id", "issue_number"],
    foreign_keys: &[REPO_FK],
};

pub static ISSUE_COMMENTS: TableSchema = TableSchema {
    name: "issue_comments",
    columns: &[
        int("repo_id"),
        int("issue_number"),
        int("comment_id"),
        text("author_login"),
        text("created_at"),
        text("body"),
    ],
    primary_key: &["repo_id", "issue_number", "comment_id"],
    foreign_keys: &[
        REPO_FK,
        ForeignKey {
            columns: &["repo_id", "issue_number"],
            target: "issues",
            target_columns: &["repo_id", "issue_number"],
        },
    ],
};

pub static SUBSCRIBERS: TableSchema = TableSchema {
    name: "subscribers",
    columns: &[int("repo_id"), int("user_id"), text("login")],
    primary_key: &["repo_id", "user_id"],
    foreign_keys: &[REPO_FK],
};

pub static COMMITS: TableSchema = TableSchema {
    name: "commits",
    columns: &[
        int("repo_id"),
        int("position"),
        text("sha"),
        text("author_login"),
        text("authored_at"),
        text("message"),
    ],
    primary_key: &["repo_id", "position"],
    foreign_keys: &[REPO_FK],
};

pub static USER: TableSchema = TableSchema {
    name: "user",
    columns: &[
        text("login"),
        int("user_id"),
        text("name"),
        int("public_repo_count"),
        int("followers"),
    ],
    primary_key: &["user_id"],
    foreign_keys: &[],
};

pub static USER_REPOS: TableSchema = TableSchema {
    name: "user_repos",
    columns: SUMMARY_COLUMNS,
    primary_key: &["repo_id"],
    foreign_keys: &[],
};

pub static USER_LANGUAGES: TableSchema = TableSchema {
    name: "user_languages",
    columns: &[text("language"), int("byte_count"), text("percent")],
    primary_key: &["language"],
    foreign_keys: &[],
};

/// The eight dataset tables, parents before children.
pub static DATASET_TABLES: [&TableSchema; 8] = [
    &REPOSITORIES,
    &LANGUAGES,
    &CONTRIBUTORS,
    &RELEASES,
    &PULL_REQUESTS,
    &ISSUES,
    &ISSUE_COMMENTS,
    &SUBSCRIBERS,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    /// CSV rendering: booleans as `true`/`false`, NULL as the empty field.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(i64::try_from(v).unwrap_or(i64::MAX))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::from(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Timestamp> for Cell {
    fn from(v: Timestamp) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<Timestamp>> for Cell {
    fn from(v: Option<Timestamp>) -> Self {
        v.map_or(Cell::Null, Cell::from)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub schema: &'static TableSchema,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(schema: &'static TableSchema) -> Self {
        Self {
            schema,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.schema.columns.len(), "{}", self.schema.name);
        self.rows.push(row);
    }
}

fn summary_row(s: &RepositorySummary) -> Vec<Cell> {
    vec![
        s.repo_id.into(),
        s.full_name.as_str().into(),
        s.owner_login.as_str().into(),
        s.stars.into(),
        s.forks.into(),
        s.watchers.into(),
        s.topic.as_str().into(),
        s.default_branch.as_str().into(),
        s.created_at.into(),
        s.description.as_str().into(),
    ]
}

/// Labels are stored as a JSON array of strings.
pub fn encode_labels(labels: &[String]) -> String {
    serde_json::to_string(labels).expect("string list serializes")
}

/// Builds the eight dataset tables. Rows are ordered by repo_id, then by
/// each table's natural key.
pub fn dataset_tables(records: &[RepositoryRecord]) -> Vec<Table> {
    let mut ordered: Vec<RepositoryRecord> = records.iter().cloned().map(RepositoryRecord::normalize).collect();
    ordered.sort_by_key(|r| r.summary.repo_id);

    let mut tables: Vec<Table> = DATASET_TABLES.iter().map(|s| Table::new(s)).collect();
    for r in &ordered {
        let id = r.summary.repo_id;
        tables[0].push(summary_row(&r.summary));
        for (lang, bytes) in &r.languages.entries {
            tables[1].push(vec![
                id.into(),
                lang.as_str().into(),
                (*bytes).into(),
                r.languages.is_prominent(lang).into(),
            ]);
        }
        for c in &r.contributors {
            tables[2].push(vec![
                id.into(),
                c.contributor_id.into(),
                c.login.as_str().into(),
                c.commit_count.into(),
            ]);
        }
        for rel in &r.releases {
            tables[3].push(vec![
                id.into(),
                rel.release_id.into(),
                rel.tag.as_str().into(),
                rel.name.as_str().into(),
                rel.published_at.into(),
                rel.is_prerelease.into(),
            ]);
        }
        for p in &r.pulls {
            tables[4].push(vec![
                id.into(),
                p.pr_number.into(),
                p.title.as_str().into(),
                p.state.as_str().into(),
                p.author_login.as_str().into(),
                p.created_at.into(),
                p.merged_at.into(),
            ]);
        }
        for i in &r.issues {
            tables[5].push(vec![
                id.into(),
                i.issue_number.into(),
                i.title.as_str().into(),
                i.state.as_str().into(),
                i.author_login.as_str().into(),
                i.created_at.into(),
                encode_labels(&i.labels).into(),
                i.comment_count.into(),
            ]);
            for c in &i.comments {
                tables[6].push(vec![
                    id.into(),
                    i.issue_number.into(),
                    c.comment_id.into(),
                    c.author_login.as_str().into(),
                    c.created_at.into(),
                    c.body.as_str().into(),
                ]);
            }
        }
        for s in &r.subscribers {
            tables[7].push(vec![id.into(), s.user_id.into(), s.login.as_str().into()]);
        }
    }
    tables
}

/// Commits in server order; `position` counts from zero.
pub fn commit_table(repo_id: i64, commits: &[CommitRecord]) -> Table {
    let mut t = Table::new(&COMMITS);
    for (pos, c) in commits.iter().enumerate() {
        t.push(vec![
            repo_id.into(),
            pos.into(),
            c.sha.as_str().into(),
            c.author_login.as_str().into(),
            c.authored_at.into(),
            c.message.as_str().into(),
        ]);
    }
    t
}

/// `user`, `user_repos` and the aggregated `user_languages` report.
pub fn user_tables(profile: &UserProfile) -> Vec<Table> {
    let mut user = Table::new(&USER);
    user.push(vec![
        profile.login.as_str().into(),
        profile.user_id.into(),
        profile.name.as_str().into(),
        profile.public_repo_count.into(),
        profile.followers.into(),
    ]);
    let mut repos = Table::new(&USER_REPOS);
    let mut summaries: Vec<&RepositorySummary> = profile.repos.iter().collect();
    summaries.sort_by_key(|s| s.repo_id);
    for s in summaries {
        repos.push(summary_row(s));
    }
    let mut langs = Table::new(&USER_LANGUAGES);
    for LanguageShare {
        language,
        byte_count,
        percent,
    } in user_language_report(profile)
    {
        langs.push(vec![language.into(), byte_count.into(), percent.to_string().into()]);
    }
    vec![user, repos, langs]
}
