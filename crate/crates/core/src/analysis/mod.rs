//! Corpus statistics: tag counts, timelines and per-label composition.
//!
//! The counting unit everywhere is the application occurrence, so one
//! stanza with two nested `rel[not]` counts `not` twice.

mod composition;
mod report;
mod timeline;

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};

use thiserror::Error;

use crate::parser::Stanza;
use crate::schema::{GrammarCategory, TagRegistry};

pub use composition::{category_composition, label_shares, CommentLabel, CommentLabels};
pub use report::{write_composition_csv, write_counts_csv, write_timeline_csv};
pub use timeline::{column_sums, timeline, TimelineBin};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("locution `{0}` is not in the dialogue")]
    UnknownLocution(String),
    #[error("locution `{0}` lies outside the timeline span")]
    AnchorOutsideSpan(String),
    #[error("bin width must be positive")]
    ZeroBinWidth,
    #[error("timeline span ends before it starts")]
    EmptySpan,
    #[error("locution `{0}` has no comment label")]
    UnlabeledLocution(String),
    #[error("no comment labels given")]
    EmptyLabels,
    #[error("locution `{0}` is labeled more than once")]
    DuplicateLabel(String),
    #[error("unknown comment label `{0}`")]
    UnknownLabel(String),
    #[error("labels file: {0}")]
    Csv(#[from] csv::Error),
}

/// Occurrence counts keyed by canonical (category, tag).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagCounts {
    counts: BTreeMap<(GrammarCategory, String), usize>,
    /// Occurrences written with an alias spelling, keyed by
    /// (canonical category, canonical tag, alias).
    alias_counts: BTreeMap<(GrammarCategory, String, String), usize>,
    total: usize,
}

impl TagCounts {
    pub fn new() -> Self {
        TagCounts::default()
    }

    pub fn get(&self, category: GrammarCategory, tag: &str) -> usize {
        self.counts
            .get(&(category, tag.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// How many occurrences were spelled `alias`.
    pub fn alias_count(&self, alias: &str) -> usize {
        let alias = alias.to_ascii_lowercase();
        self.alias_counts
            .iter()
            .filter(|((_, _, a), _)| *a == alias)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Non-zero cells in category then tag order.
    pub fn iter(&self) -> impl Iterator<Item = (GrammarCategory, &str, usize)> {
        self.counts.iter().map(|((c, t), &n)| (*c, t.as_str(), n))
    }

    pub fn aliases(&self) -> impl Iterator<Item = (GrammarCategory, &str, &str, usize)> {
        self.alias_counts
            .iter()
            .map(|((c, t, a), &n)| (*c, t.as_str(), a.as_str(), n))
    }

    /// Totals per grammar category, indexed by [`GrammarCategory::index`].
    pub fn per_category(&self) -> [usize; 5] {
        let mut out = [0; 5];
        for ((c, _), n) in &self.counts {
            out[c.index()] += n;
        }
        out
    }

    fn record(&mut self, category: GrammarCategory, tag: &str, alias: Option<&str>) {
        *self.counts.entry((category, tag.to_string())).or_default() += 1;
        if let Some(alias) = alias {
            *self
                .alias_counts
                .entry((category, tag.to_string(), alias.to_string()))
                .or_default() += 1;
        }
        self.total += 1;
    }

    fn add_stanza(&mut self, stanza: &Stanza, registry: &TagRegistry) {
        for app in stanza.term.applications() {
            match registry.lookup(app.category, &app.tag) {
                Ok(res) => self.record(
                    res.signature.category,
                    &res.signature.name,
                    res.alias.as_deref(),
                ),
                Err(_) => self.record(app.category, &app.tag, None),
            }
        }
    }
}

impl AddAssign<&TagCounts> for TagCounts {
    fn add_assign(&mut self, rhs: &TagCounts) {
        for (k, n) in &rhs.counts {
            *self.counts.entry(k.clone()).or_default() += n;
        }
        for (k, n) in &rhs.alias_counts {
            *self.alias_counts.entry(k.clone()).or_default() += n;
        }
        self.total += rhs.total;
    }
}

impl Add for TagCounts {
    type Output = TagCounts;

    fn add(mut self, rhs: TagCounts) -> TagCounts {
        self += &rhs;
        self
    }
}

/// Counts every application occurrence, nested ones included, under its
/// canonical tag. Unknown tags count as written.
pub fn count_tags<'a>(
    stanzas: impl IntoIterator<Item = &'a Stanza>,
    registry: &TagRegistry,
) -> TagCounts {
    let mut counts = TagCounts::new();
    for s in stanzas {
        counts.add_stanza(s, registry);
    }
    counts
}
