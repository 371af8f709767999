use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::Deserialize;

use super::{count_tags, AnalysisError, TagCounts};
use crate::parser::Stanza;
use crate::schema::TagRegistry;

/// The five comment kinds of the mathematical-discussion typology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CommentLabel {
    Example,
    Conjecture,
    Concept,
    Proof,
    Other,
}

impl CommentLabel {
    pub const ALL: [CommentLabel; 5] = [
        CommentLabel::Example,
        CommentLabel::Conjecture,
        CommentLabel::Concept,
        CommentLabel::Proof,
        CommentLabel::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommentLabel::Example => "example",
            CommentLabel::Conjecture => "conjecture",
            CommentLabel::Concept => "concept",
            CommentLabel::Proof => "proof",
            CommentLabel::Other => "other",
        }
    }
}

impl fmt::Display for CommentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CommentLabel {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CommentLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| AnalysisError::UnknownLabel(s.to_string()))
    }
}

/// One label per locution.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommentLabels {
    labels: BTreeMap<String, CommentLabel>,
}

#[derive(Deserialize)]
struct LabelRow {
    locution: String,
    label: String,
}

impl CommentLabels {
    pub fn new() -> Self {
        CommentLabels::default()
    }

    /// Adds a label; a locution may carry only one.
    pub fn insert(
        &mut self,
        locution: impl Into<String>,
        label: CommentLabel,
    ) -> Result<(), AnalysisError> {
        let locution = locution.into();
        if self.labels.contains_key(&locution) {
            return Err(AnalysisError::DuplicateLabel(locution));
        }
        self.labels.insert(locution, label);
        Ok(())
    }

    /// Reads CSV with header `locution,label`.
    pub fn from_csv(reader: impl Read) -> Result<CommentLabels, AnalysisError> {
        let mut out = CommentLabels::new();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        for row in rdr.deserialize() {
            let row: LabelRow = row?;
            out.insert(row.locution, row.label.parse()?)?;
        }
        Ok(out)
    }

    pub fn get(&self, locution: &str) -> Option<CommentLabel> {
        self.labels.get(locution).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, CommentLabel)> {
        self.labels.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Tag counts of anchored stanzas grouped by their locution's label.
/// Only labels with at least one stanza appear.
pub fn category_composition<'a>(
    stanzas: impl IntoIterator<Item = &'a Stanza>,
    labels: &CommentLabels,
    registry: &TagRegistry,
) -> Result<BTreeMap<CommentLabel, TagCounts>, AnalysisError> {
    let mut out: BTreeMap<CommentLabel, TagCounts> = BTreeMap::new();
    for s in stanzas {
        let Some(anchor) = &s.anchor else { continue };
        let label = labels
            .get(anchor)
            .ok_or_else(|| AnalysisError::UnlabeledLocution(anchor.clone()))?;
        *out.entry(label).or_default() += &count_tags([s], registry);
    }
    Ok(out)
}

/// Fraction of labeled locutions carrying each label; all five labels
/// are present and the fractions sum to one.
pub fn label_shares(labels: &CommentLabels) -> Result<BTreeMap<CommentLabel, f64>, AnalysisError> {
    if labels.is_empty() {
        return Err(AnalysisError::EmptyLabels);
    }
    let mut counts: BTreeMap<CommentLabel, usize> =
        CommentLabel::ALL.iter().map(|&l| (l, 0)).collect();
    for (_, l) in labels.iter() {
        *counts.get_mut(&l).expect("all labels seeded") += 1;
    }
    let total = labels.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(l, n)| (l, n as f64 / total))
        .collect())
}
