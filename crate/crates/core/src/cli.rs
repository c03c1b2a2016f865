//! Command-line front end: `dataset`, `repo` and `user` subcommands.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. Reports go to
//! stdout, diagnostics to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{
    contribution_report, render_contribution_table, render_language_table, user_language_report,
};
use crate::client::{ApiClient, Credentials, HttpTransport, Transport, GITHUB_API_BASE};
use crate::export::{self, Format};
use crate::model::Timestamp;
use crate::pipeline::{Extractor, FilterCriteria, DEFAULT_CONCURRENCY};
use crate::replay::{self, ReplayTransport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DATASET_DB: &str = "dataset.db";
pub const REPO_DB: &str = "repo.db";
pub const USER_DB: &str = "user.db";

/// Pins `started_at` in the manifest when set to unix seconds.
pub const SOURCE_DATE_EPOCH: &str = "SOURCE_DATE_EPOCH";

#[derive(Debug, Parser)]
#[command(name = "ghminer", version, about = "Mine GitHub repository metadata into CSV and SQLite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a filtered dataset of repositories for a topic.
    Dataset {
        #[arg(long)]
        topic: String,
        #[arg(long, default_value_t = 0)]
        min_stars: u64,
        #[arg(long, default_value_t = 0)]
        min_forks: u64,
        #[arg(long, default_value_t = 0)]
        min_releases: u64,
        #[arg(long, default_value_t = 0)]
        min_contributors: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_repos: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Extract one repository and its commit history.
    Repo {
        #[arg(long)]
        owner: String,
        #[arg(long)]
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Extract one user's profile and repositories.
    User {
        #[arg(long)]
        login: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Db,
    Both,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
    /// Name of the environment variable holding the API token.
    #[arg(long, default_value = "GITHUB_TOKEN")]
    token_env: String,
    /// API root; also accepts `replay:DIR` and `record:DIR`.
    #[arg(long, default_value = GITHUB_API_BASE)]
    base_url: String,
    #[arg(long, default_value_t = DEFAULT_CONCURRENCY as u64, value_parser = clap::value_parser!(u64).range(1..=64))]
    concurrency: u64,
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Dataset(FilterCriteria),
    Repo { owner: String, name: String },
    User { login: String },
}

/// Where requests go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Http(String),
    Replay(PathBuf),
    Record(PathBuf),
}

impl Endpoint {
    fn parse(raw: &str) -> Result<Self, String> {
        if let Some(dir) = raw.strip_prefix("replay:") {
            return non_empty(dir).map(|d| Endpoint::Replay(d.into()));
        }
        if let Some(dir) = raw.strip_prefix("record:") {
            return non_empty(dir).map(|d| Endpoint::Record(d.into()));
        }
        match url::Url::parse(raw) {
            Ok(u) if matches!(u.scheme(), "http" | "https") && u.has_host() => {
                Ok(Endpoint::Http(raw.trim_end_matches('/').to_string()))
            }
            Ok(u) => Err(format!("unsupported scheme `{}`", u.scheme())),
            Err(e) => Err(e.to_string()),
        }
    }
}

fn non_empty(dir: &str) -> Result<&str, String> {
    if dir.is_empty() {
        Err("missing fixture directory".into())
    } else {
        Ok(dir)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub format: Format,
    pub token_env: String,
    pub endpoint: Endpoint,
    pub concurrency: usize,
    pub verbose: bool,
}

#[derive(Debug)]
pub struct UsageError {
    /// Rendered message, including help or version text.
    pub message: String,
    /// 0 for `--help`/`--version`, otherwise [`EXIT_USAGE`].
    pub exit_code: i32,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message.trim_end())
    }
}

impl std::error::Error for UsageError {}

fn usage(message: String) -> UsageError {
    UsageError {
        message,
        exit_code: EXIT_USAGE,
    }
}

/// Parses arguments after the program name.
pub fn parse_args<I, S>(argv: I) -> Result<CliConfig, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("ghminer")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(|e| UsageError {
        message: e.render().to_string(),
        exit_code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
    })?;
    let (mode, common) = match cli.command {
        Command::Dataset {
            topic,
            min_stars,
            min_forks,
            min_releases,
            min_contributors,
            max_repos,
            common,
        } => {
            let criteria = FilterCriteria {
                topic,
                min_stars,
                min_forks,
                min_releases,
                min_contributors,
                max_repos: max_repos.map(|m| m as usize),
            };
            criteria
                .validate()
                .map_err(|e| usage(format!("error: --topic: {e}")))?;
            (Mode::Dataset(criteria), common)
        }
        Command::Repo { owner, name, common } => {
            for (flag, v) in [("--owner", &owner), ("--name", &name)] {
                if v.is_empty() || v.contains('/') {
                    return Err(usage(format!("error: {flag}: `{v}` is not a valid path segment")));
                }
            }
            (Mode::Repo { owner, name }, common)
        }
        Command::User { login, common } => {
            if login.is_empty() || login.contains('/') {
                return Err(usage(format!("error: --login: `{login}` is not a valid login")));
            }
            (Mode::User { login }, common)
        }
    };
    let endpoint = Endpoint::parse(&common.base_url)
        .map_err(|e| usage(format!("error: --base-url `{}`: {e}", common.base_url)))?;
    if common.token_env.is_empty() {
        return Err(usage("error: --token-env must name a variable".into()));
    }
    Ok(CliConfig {
        mode,
        out_dir: common.out,
        format: match common.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Db => Format::Db,
            FormatArg::Both => Format::Both,
        },
        token_env: common.token_env,
        endpoint,
        concurrency: common.concurrency as usize,
        verbose: common.verbose,
    })
}

type BoxError = Box<dyn std::error::Error + Send + Sync>;

fn transport(endpoint: &Endpoint, creds: &Credentials) -> Result<Arc<dyn Transport>, BoxError> {
    Ok(match endpoint {
        Endpoint::Http(url) => Arc::new(HttpTransport::new(url.clone())?),
        Endpoint::Replay(dir) => Arc::new(ReplayTransport::open(dir)?.strict(true)),
        Endpoint::Record(dir) => Arc::new(replay::record(GITHUB_API_BASE, dir.clone(), creds)?),
    })
}

/// Runs a parsed command. `env` looks up environment variables.
pub fn run(
    config: &CliConfig,
    env: &dyn Fn(&str) -> Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    match execute(config, env, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", one_line(&*e));
            EXIT_RUNTIME
        }
    }
}

fn one_line(e: &(dyn std::error::Error + 'static)) -> String {
    let mut msg = e.to_string();
    let mut source = e.source();
    while let Some(s) = source {
        let text = s.to_string();
        if !msg.contains(&text) {
            msg.push_str(": ");
            msg.push_str(&text);
        }
        source = s.source();
    }
    msg.replace('\n', " ")
}

fn execute(
    config: &CliConfig,
    env: &dyn Fn(&str) -> Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), BoxError> {
    let creds = match env(&config.token_env).filter(|t| !t.is_empty()) {
        Some(token) => Credentials::with_token(token),
        None => Credentials::anonymous(),
    };
    let client = Arc::new(ApiClient::new(transport(&config.endpoint, &creds)?, creds));
    let extractor = Extractor::with_concurrency(client, config.concurrency)?;
    let out = &config.out_dir;

    match &config.mode {
        Mode::Dataset(criteria) => {
            let (records, mut manifest) = extractor.run_dataset(criteria)?;
            if let Some(epoch) = env(SOURCE_DATE_EPOCH) {
                let secs: i64 = epoch
                    .trim()
                    .parse()
                    .map_err(|_| format!("{SOURCE_DATE_EPOCH} is not an integer"))?;
                manifest.started_at =
                    Timestamp::from_unix(secs).ok_or_else(|| format!("{SOURCE_DATE_EPOCH} out of range"))?;
            }
            for d in &manifest.diagnostics {
                writeln!(stderr, "warning: dropped {} at {}: {}", d.full_name, d.stage, d.message)?;
            }
            if manifest.search_capped {
                writeln!(stderr, "warning: search results capped at {}", crate::pipeline::SEARCH_RESULT_LIMIT)?;
            }
            export::export_dataset(&records, &manifest, out, config.format, DATASET_DB)?;
            let c = &manifest.counts;
            writeln!(stdout, "searched: {}", c.searched)?;
            writeln!(stdout, "after stars/forks: {}", c.after_basic)?;
            writeln!(stdout, "after releases: {}", c.after_releases)?;
            writeln!(stdout, "after contributors: {}", c.after_contributors)?;
        }
        Mode::Repo { owner, name } => {
            let (record, commits) = extractor.run_single_repo(owner, name)?;
            if config.format.csv() {
                export::export_repo_csv(&record, &commits, out)?;
            }
            if config.format.db() {
                ensure_dir(out)?;
                export::export_repo_db(&record, &commits, &out.join(REPO_DB), false)?;
            }
            writeln!(stdout, "repository: {}", record.summary.full_name)?;
            writeln!(stdout, "commits: {}", commits.len())?;
            writeln!(stdout, "contributors: {}", record.contributors.len())?;
            writeln!(stdout)?;
            stdout.write_all(render_contribution_table(&contribution_report(&record.contributors)).as_bytes())?;
        }
        Mode::User { login } => {
            let profile = extractor.run_single_user(login)?;
            if config.format.csv() {
                export::export_user(&profile, out)?;
            }
            if config.format.db() {
                ensure_dir(out)?;
                export::export_user_db(&profile, &out.join(USER_DB), false)?;
            }
            writeln!(stdout, "user: {}", profile.login)?;
            writeln!(stdout, "repositories: {}", profile.repos.len())?;
            writeln!(stdout)?;
            stdout.write_all(render_language_table(&user_language_report(&profile)).as_bytes())?;
        }
    }
    stdout.flush()?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)
}
