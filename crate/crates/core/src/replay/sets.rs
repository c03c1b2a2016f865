//! The fixture sets committed under `tests/fixtures/`, regenerated by
//! `cargo run --example gen_fixtures`.

use crate::pipeline::FilterCriteria;

use super::synthetic::{register_dataset, FixtureBuilder, RepoSpec, UserSpec};
use super::FixtureEntry;

const RATE_REMAINING: u64 = 4_990;
const RATE_RESET: i64 = 1_451_610_000;

fn builder() -> FixtureBuilder {
    FixtureBuilder::new().with_rate_headers(RATE_REMAINING, RATE_RESET)
}

fn langs(pairs: &[(&str, u64)]) -> Vec<(String, u64)> {
    pairs.iter().map(|(l, n)| (l.to_string(), *n)).collect()
}

pub const THREE_REPOS: &str = "three_repos";
pub const THREE_REPOS_TOPIC: &str = "compilers";

pub fn three_repo_specs() -> Vec<RepoSpec> {
    vec![
        RepoSpec {
            stars: 320,
            forks: 41,
            description: "Tiny, fast compiler".into(),
            languages: langs(&[("C++", 9_000), ("C", 700), ("Python", 300)]),
            releases: 3,
            contributors: vec![50, 30, 20],
            pulls: 4,
            issue_comments: vec![2, 0, 1],
            pr_marked_issues: 2,
            subscribers: 3,
            ..RepoSpec::new(101, "llvm-lite", "core")
        },
        RepoSpec {
            stars: 150,
            forks: 12,
            languages: langs(&[("C", 5_000), ("Assembly", 5_000)]),
            contributors: vec![7],
            ..RepoSpec::new(202, "tinycc", "tcc")
        },
        RepoSpec {
            stars: 75,
            forks: 3,
            description: "Parser \"kit\"\nsecond line".into(),
            releases: 12,
            contributors: vec![1, 1],
            pulls: 3,
            issue_comments: vec![0, 4],
            pr_marked_issues: 3,
            subscribers: 1,
            ..RepoSpec::new(303, "acme", "parse-kit")
        },
    ]
}

pub fn three_repos() -> Vec<FixtureEntry> {
    let mut b = builder();
    register_dataset(&mut b, THREE_REPOS_TOPIC, &three_repo_specs());
    b.build()
}

pub const FUNNEL: &str = "funnel";
pub const FUNNEL_TOPIC: &str = "static-analysis";

pub fn funnel_criteria() -> FilterCriteria {
    FilterCriteria {
        min_stars: 50,
        min_forks: 10,
        min_releases: 2,
        min_contributors: 3,
        ..FilterCriteria::new(FUNNEL_TOPIC)
    }
}

pub fn funnel_specs() -> Vec<RepoSpec> {
    let base = |id: i64, name: &str, stars: u64, forks: u64, releases: usize, contributors: Vec<u64>| RepoSpec {
        stars,
        forks,
        releases,
        contributors,
        languages: langs(&[("Java", 4_000 + id as u64), ("Kotlin", 900)]),
        pulls: 2,
        issue_comments: vec![1],
        pr_marked_issues: 1,
        subscribers: 2,
        ..RepoSpec::new(id, "lint-org", name)
    };
    vec![
        base(1, "sentinel", 900, 120, 5, (0..130).map(|i| 200 - i).collect()),
        base(2, "few-forks", 500, 5, 4, vec![9, 9, 9]),
        base(3, "few-stars", 40, 30, 4, vec![9, 9, 9]),
        base(4, "edge", 50, 10, 2, vec![1, 1, 1]),
        base(5, "one-release", 300, 60, 1, vec![5, 5, 5]),
        base(6, "no-release", 250, 44, 0, vec![5, 5, 5]),
        base(7, "duo", 220, 25, 3, vec![9, 2]),
        RepoSpec {
            failures: vec![("pulls", 404)],
            ..base(8, "broken-pulls", 180, 18, 4, vec![5, 5, 5, 5])
        },
        base(9, "checker", 150, 11, 2, vec![3, 2, 1, 1, 1]),
        RepoSpec {
            failures: vec![("languages", 404)],
            ..base(10, "broken-langs", 120, 200, 3, vec![4, 4, 4])
        },
    ]
}

pub fn funnel() -> Vec<FixtureEntry> {
    let mut b = builder();
    register_dataset(&mut b, FUNNEL_TOPIC, &funnel_specs());
    b.build()
}

pub const SINGLE_REPO: &str = "single_repo";

pub fn single_repo_spec() -> RepoSpec {
    RepoSpec {
        stars: 12,
        forks: 2,
        description: "Widgets".into(),
        languages: langs(&[("Rust", 8_000), ("Shell", 200)]),
        releases: 2,
        contributors: vec![40, 25, 25, 10],
        pulls: 2,
        issue_comments: vec![1],
        subscribers: 2,
        commits: 130,
        ..RepoSpec::new(4_242, "acme", "widget")
    }
}

pub fn single_repo() -> Vec<FixtureEntry> {
    let mut b = builder();
    single_repo_spec().register(&mut b);
    b.build()
}

pub const PRIVATE_ANON: &str = "private_anon";
pub const PRIVATE_AUTH: &str = "private_auth";

pub fn private_spec() -> RepoSpec {
    RepoSpec {
        stars: 1,
        languages: langs(&[("Go", 10)]),
        contributors: vec![3],
        commits: 3,
        ..RepoSpec::new(777, "acme", "secret")
    }
}

/// The private repository as seen without a token.
pub fn private_anon() -> Vec<FixtureEntry> {
    let mut b = builder();
    RepoSpec {
        failures: vec![("repository", 401)],
        ..private_spec()
    }
    .register(&mut b);
    b.build()
}

pub fn private_auth() -> Vec<FixtureEntry> {
    let mut b = builder();
    private_spec().register(&mut b);
    b.build()
}

pub const USER: &str = "user";

pub fn user_spec() -> UserSpec {
    let repo = |id: i64, name: &str, l: &[(&str, u64)]| RepoSpec {
        stars: id as u64 % 7,
        languages: langs(l),
        ..RepoSpec::new(id, "octo", name)
    };
    UserSpec {
        login: "octo".into(),
        id: 9_001,
        name: "Octo Cat".into(),
        followers: 42,
        repos: vec![
            repo(501, "alpha", &[("Go", 100)]),
            repo(502, "beta", &[("Go", 50), ("Rust", 50)]),
            repo(503, "gamma", &[("Rust", 10)]),
        ],
    }
}

pub fn user() -> Vec<FixtureEntry> {
    let mut b = builder();
    user_spec().register(&mut b);
    b.build()
}

/// Every committed set, by directory name.
pub fn all() -> Vec<(&'static str, Vec<FixtureEntry>)> {
    vec![
        (THREE_REPOS, three_repos()),
        (FUNNEL, funnel()),
        (SINGLE_REPO, single_repo()),
        (PRIVATE_ANON, private_anon()),
        (PRIVATE_AUTH, private_auth()),
        (USER, user()),
    ]
}
