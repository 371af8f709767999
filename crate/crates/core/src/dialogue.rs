//! Dated locutions that stanzas anchor to.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const TIMESTAMP_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M",
    "%Y-%m-%d %H:%M:%S",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Locution {
    pub id: String,
    pub speaker: String,
    #[serde(with = "minute_timestamp")]
    pub timestamp: NaiveDateTime,
    #[serde(rename = "parent", default)]
    pub thread_parent: Option<String>,
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dialogue {
    pub title: String,
    locutions: Vec<Locution>,
    index: BTreeMap<String, usize>,
}

#[derive(Debug, Error)]
pub enum DialogueError {
    #[error("cannot read dialogue: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed dialogue JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate locution id `{0}`")]
    DuplicateId(String),
    #[error("locution `{id}` has parent `{parent}`, which is not an earlier locution")]
    BadParent { id: String, parent: String },
    #[error("locution `{id}` is dated before its predecessor")]
    TimestampOrder { id: String },
}

impl Dialogue {
    /// Builds a dialogue, checking id uniqueness, thread parents and
    /// timestamp order.
    pub fn new(
        title: impl Into<String>,
        locutions: Vec<Locution>,
    ) -> Result<Dialogue, DialogueError> {
        let mut index = BTreeMap::new();
        for (i, loc) in locutions.iter().enumerate() {
            if let Some(parent) = &loc.thread_parent {
                if !index.contains_key(parent) {
                    return Err(DialogueError::BadParent {
                        id: loc.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
            if i > 0 && loc.timestamp < locutions[i - 1].timestamp {
                return Err(DialogueError::TimestampOrder { id: loc.id.clone() });
            }
            if index.insert(loc.id.clone(), i).is_some() {
                return Err(DialogueError::DuplicateId(loc.id.clone()));
            }
        }
        Ok(Dialogue {
            title: title.into(),
            locutions,
            index,
        })
    }

    pub fn from_json(title: impl Into<String>, json: &str) -> Result<Dialogue, DialogueError> {
        Dialogue::new(title, serde_json::from_str(json)?)
    }

    /// Loads a JSON array of locutions; the title is the file stem.
    pub fn from_file(path: &Path) -> Result<Dialogue, DialogueError> {
        let title = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Dialogue::from_json(title, &std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.locutions).expect("locutions serialize")
    }

    pub fn locutions(&self) -> &[Locution] {
        &self.locutions
    }

    pub fn get(&self, id: &str) -> Option<&Locution> {
        self.index.get(id).map(|&i| &self.locutions[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.locutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locutions.is_empty()
    }

    /// First and last timestamps, if any locutions exist.
    pub fn time_span(&self) -> Option<(NaiveDateTime, NaiveDateTime)> {
        Some((
            self.locutions.first()?.timestamp,
            self.locutions.last()?.timestamp,
        ))
    }
}

/// Parses `YYYY-MM-DDTHH:MM`, optionally with seconds or a space
/// separator. Seconds are dropped.
pub fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text.trim(), f).ok())
        .and_then(|t| t.with_second(0))
}

mod minute_timestamp {
    use chrono::NaiveDateTime;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &NaiveDateTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.format("%Y-%m-%dT%H:%M").to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDateTime, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_timestamp(&text)
            .ok_or_else(|| de::Error::custom(format!("invalid timestamp `{text}`")))
    }
}
