//! Percentage reports: per-contributor commit share for one repository and
//! language byte share across all of a user's repositories.
//!
//! Shares are exact rationals; the two-decimal rendering rounds half to
//! even and is not adjusted to force a 100.00 total.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::model::{Contributor, UserProfile};

/// An exact percentage in [0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(Ratio<u128>);

impl Percent {
    pub fn of(part: u64, total: u64) -> Self {
        if total == 0 {
            return Percent(Ratio::from_integer(0));
        }
        Percent(Ratio::new(part as u128 * 100, total as u128))
    }

    pub fn exact(&self) -> Ratio<u128> {
        self.0
    }

    /// The value in hundredths of a percent, rounded half to even.
    pub fn hundredths(&self) -> u128 {
        let scaled_numer = *self.0.numer() * 100;
        let denom = *self.0.denom();
        let (q, r) = (scaled_numer / denom, scaled_numer % denom);
        match (2 * r).cmp(&denom) {
            Ordering::Less => q,
            Ordering::Greater => q + 1,
            Ordering::Equal => q + (q & 1),
        }
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hundredths();
        let text = format!("{}.{:02}", h / 100, h % 100);
        f.pad(&text)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContributionShare {
    pub login: String,
    pub commit_count: u64,
    pub percent: Percent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageShare {
    pub language: String,
    pub byte_count: u64,
    pub percent: Percent,
}

/// Sorted by share descending, then login ascending.
pub fn contribution_report(contributors: &[Contributor]) -> Vec<ContributionShare> {
    let total: u64 = contributors.iter().map(|c| c.commit_count).sum();
    let mut report: Vec<_> = contributors
        .iter()
        .map(|c| ContributionShare {
            login: c.login.clone(),
            commit_count: c.commit_count,
            percent: Percent::of(c.commit_count, total),
        })
        .collect();
    report.sort_by(|a, b| b.percent.cmp(&a.percent).then_with(|| a.login.cmp(&b.login)));
    report
}

/// Byte counts summed per language over every repository of the profile.
pub fn user_language_report(profile: &UserProfile) -> Vec<LanguageShare> {
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for breakdown in profile.repo_languages.values() {
        for (lang, bytes) in &breakdown.entries {
            *totals.entry(lang).or_default() += bytes;
        }
    }
    let total: u64 = totals.values().sum();
    let mut report: Vec<_> = totals
        .into_iter()
        .map(|(language, byte_count)| LanguageShare {
            language: language.to_string(),
            byte_count,
            percent: Percent::of(byte_count, total),
        })
        .collect();
    report.sort_by(|a, b| {
        b.percent
            .cmp(&a.percent)
            .then_with(|| a.language.cmp(&b.language))
    });
    report
}

fn render_table(headers: [&str; 3], rows: Vec<[String; 3]>) -> String {
    let mut widths = headers.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 3]| {
        out.push_str(&format!(
            "{:<w0$}  {:>w1$}  {:>w2$}\n",
            cells[0],
            cells[1],
            cells[2],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        ));
    };
    line(headers);
    for row in &rows {
        line([&row[0], &row[1], &row[2]]);
    }
    out
}

pub fn render_contribution_table(report: &[ContributionShare]) -> String {
    render_table(
        ["contributor", "commits", "percent"],
        report
            .iter()
            .map(|s| [s.login.clone(), s.commit_count.to_string(), s.percent.to_string()])
            .collect(),
    )
}

pub fn render_language_table(report: &[LanguageShare]) -> String {
    render_table(
        ["language", "bytes", "percent"],
        report
            .iter()
            .map(|s| [s.language.clone(), s.byte_count.to_string(), s.percent.to_string()])
            .collect(),
    )
}
