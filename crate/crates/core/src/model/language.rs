use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Byte-share cut-off for calling a language prominent, held in basis
/// points so comparisons stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProminenceThreshold {
    basis_points: u32,
}

impl ProminenceThreshold {
    pub const DEFAULT: Self = Self { basis_points: 1000 };

    /// `fraction` must lie in (0, 1]; it is rounded to the nearest basis
    /// point.
    pub fn from_fraction(fraction: f64) -> Option<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return None;
        }
        let basis_points = (fraction * 10_000.0).round() as u32;
        (basis_points >= 1).then_some(Self { basis_points })
    }

    pub fn basis_points(&self) -> u32 {
        self.basis_points
    }

    /// `bytes / total >= threshold`, decided in integers.
    fn admits(&self, bytes: u64, total: u64) -> bool {
        bytes as u128 * 10_000 >= self.basis_points as u128 * total as u128
    }
}

impl Default for ProminenceThreshold {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A repository's language map split into prominent and other languages.
/// Both lists are sorted by language name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageBreakdown {
    pub entries: BTreeMap<String, u64>,
    pub prominent: Vec<String>,
    pub others: Vec<String>,
}

impl LanguageBreakdown {
    pub fn total_bytes(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_prominent(&self, language: &str) -> bool {
        self.prominent.iter().any(|l| l == language)
    }
}

/// Splits `entries` by byte share. When no language reaches the threshold
/// (or every count is zero) the largest one is promoted, ties going to the
/// lexicographically smallest name.
pub fn classify_languages(
    entries: &BTreeMap<String, u64>,
    threshold: ProminenceThreshold,
) -> LanguageBreakdown {
    let total: u64 = entries.values().sum();
    let mut prominent: Vec<String> = if total == 0 {
        Vec::new()
    } else {
        entries
            .iter()
            .filter(|(_, &bytes)| threshold.admits(bytes, total))
            .map(|(name, _)| name.clone())
            .collect()
    };
    if prominent.is_empty() {
        // BTreeMap iterates names ascending, so the first max wins ties.
        let top = entries
            .iter()
            .fold(None::<(&String, u64)>, |best, (name, &bytes)| match best {
                Some((_, b)) if b >= bytes => best,
                _ => Some((name, bytes)),
            });
        if let Some((name, _)) = top {
            prominent.push(name.clone());
        }
    }
    let others = entries
        .keys()
        .filter(|k| !prominent.contains(k))
        .cloned()
        .collect();
    LanguageBreakdown {
        entries: entries.clone(),
        prominent,
        others,
    }
}
