//! The IATC tag registry.
//!
//! Every tag the annotation language knows about is described by a
//! [`TagSignature`]: its grammar category, canonical spelling, ordered slot
//! roles and arity bounds. A [`TagRegistry`] indexes signatures by every
//! spelling (canonical names and aliases) so that lookups are
//! case-insensitive and tolerant of the category slips that occur in
//! hand-written corpora.
//!
//! Registries are persisted as a flat text table, one signature per line:
//!
//! ```text
//! # category name min max slots... [alias=[category/]name[:rev]]...
//! value efficient 1 1 s:statement
//! struct used_in 2 2 o:object s:any alias=rel/structural:rev
//! ```
//!
//! A slot token is either a bare kind (`statement`) or `symbol:kind`. The
//! maximum arity may be `*` for variadic tags, in which case the last slot
//! repeats.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::{codes, Diagnostic};

/// The five tag families of the annotation language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrammarCategory {
    Perf,
    Rel,
    Value,
    Meta,
    Struct,
}

impl GrammarCategory {
    pub const ALL: [GrammarCategory; 5] = [
        GrammarCategory::Perf,
        GrammarCategory::Rel,
        GrammarCategory::Value,
        GrammarCategory::Meta,
        GrammarCategory::Struct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GrammarCategory::Perf => "perf",
            GrammarCategory::Rel => "rel",
            GrammarCategory::Value => "value",
            GrammarCategory::Meta => "meta",
            GrammarCategory::Struct => "struct",
        }
    }

    /// Position in [`GrammarCategory::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for GrammarCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrammarCategory {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GrammarCategory::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SchemaError::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    Statement,
    Object,
    Method,
    Property,
    /// A heuristic value expression.
    Value,
    Set,
    Any,
}

impl SlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SlotKind::Statement => "statement",
            SlotKind::Object => "object",
            SlotKind::Method => "method",
            SlotKind::Property => "property",
            SlotKind::Value => "value",
            SlotKind::Set => "set",
            SlotKind::Any => "any",
        }
    }

    fn default_symbols(self) -> &'static [&'static str] {
        match self {
            SlotKind::Statement => &["s", "t"],
            SlotKind::Object => &["o", "d"],
            SlotKind::Method => &["m", "n"],
            SlotKind::Property => &["p"],
            SlotKind::Value => &["v"],
            SlotKind::Set => &["s_i", "p_i"],
            SlotKind::Any => &["x", "y"],
        }
    }
}

impl FromStr for SlotKind {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "statement" => SlotKind::Statement,
            "object" => SlotKind::Object,
            "method" => SlotKind::Method,
            "property" => SlotKind::Property,
            "value" | "value-expression" => SlotKind::Value,
            "set" => SlotKind::Set,
            "any" => SlotKind::Any,
            _ => return Err(SchemaError::UnknownSlotKind(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotRole {
    pub name: String,
    pub kind: SlotKind,
    pub optional: bool,
}

/// An alternative spelling of a tag.
///
/// `category` is the category the alias is written under. When the alias
/// is spelled under a category other than the target's, lookups through it
/// do not raise a category-mismatch lint. `permutation[i]` names the written
/// argument that fills canonical slot `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TagAlias {
    pub name: String,
    pub category: GrammarCategory,
    pub permutation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TagSignature {
    pub category: GrammarCategory,
    pub name: String,
    pub slots: Vec<SlotRole>,
    pub variadic: bool,
    pub min_arity: usize,
    pub max_arity: Option<usize>,
    pub aliases: Vec<TagAlias>,
}

impl TagSignature {
    /// Builds a fixed-arity signature. Slots past `min_arity` are optional.
    pub fn new(
        category: GrammarCategory,
        name: impl Into<String>,
        slots: Vec<(String, SlotKind)>,
        min_arity: usize,
    ) -> Result<Self, SchemaError> {
        let max = slots.len();
        Self::build(category, name.into(), slots, min_arity, Some(max))
    }

    /// Builds a variadic signature whose last slot repeats.
    pub fn variadic(
        category: GrammarCategory,
        name: impl Into<String>,
        slots: Vec<(String, SlotKind)>,
        min_arity: usize,
    ) -> Result<Self, SchemaError> {
        Self::build(category, name.into(), slots, min_arity, None)
    }

    fn build(
        category: GrammarCategory,
        name: String,
        slots: Vec<(String, SlotKind)>,
        min_arity: usize,
        max_arity: Option<usize>,
    ) -> Result<Self, SchemaError> {
        if !is_identifier(&name) {
            return Err(SchemaError::InvalidSignature(format!(
                "`{name}` is not an identifier"
            )));
        }
        if slots.is_empty() {
            return Err(SchemaError::InvalidSignature(format!(
                "`{name}` declares no slots"
            )));
        }
        if let Some(max) = max_arity {
            if min_arity > max {
                return Err(SchemaError::InvalidSignature(format!(
                    "`{name}`: min arity {min_arity} exceeds max arity {max}"
                )));
            }
        }
        let slots = slots
            .into_iter()
            .enumerate()
            .map(|(i, (name, kind))| SlotRole {
                name,
                kind,
                optional: i >= min_arity,
            })
            .collect();
        Ok(TagSignature {
            category,
            name,
            slots,
            variadic: max_arity.is_none(),
            min_arity,
            max_arity,
            aliases: Vec::new(),
        })
    }

    /// Adds an alias spelled under this signature's own category.
    pub fn with_alias(self, name: impl Into<String>) -> Self {
        let category = self.category;
        self.with_alias_in(category, name, None)
    }

    pub fn with_alias_in(
        mut self,
        category: GrammarCategory,
        name: impl Into<String>,
        permutation: Option<Vec<usize>>,
    ) -> Self {
        self.aliases.push(TagAlias {
            name: name.into(),
            category,
            permutation,
        });
        self
    }

    pub fn accepts_arity(&self, n: usize) -> bool {
        n >= self.min_arity && self.max_arity.is_none_or(|max| n <= max)
    }

    /// The slot filled by argument `index`; the last slot repeats for variadic tags.
    pub fn slot(&self, index: usize) -> Option<&SlotRole> {
        match self.slots.get(index) {
            Some(slot) => Some(slot),
            None if self.variadic => self.slots.last(),
            None => None,
        }
    }

    fn arity_text(&self) -> String {
        match self.max_arity {
            Some(max) if max == self.min_arity => max.to_string(),
            Some(max) => format!("{}..{}", self.min_arity, max),
            None => format!("{} or more", self.min_arity),
        }
    }

    pub fn describe_arity(&self) -> String {
        self.arity_text()
    }

    /// Renders this signature as one registry table line.
    pub fn to_table_line(&self) -> String {
        let mut line = format!(
            "{} {} {} {}",
            self.category,
            self.name,
            self.min_arity,
            self.max_arity
                .map_or_else(|| "*".to_string(), |m| m.to_string())
        );
        for slot in &self.slots {
            line.push_str(&format!(" {}:{}", slot.name, slot.kind.as_str()));
        }
        for alias in &self.aliases {
            line.push_str(" alias=");
            if alias.category != self.category {
                line.push_str(&format!("{}/", alias.category));
            }
            line.push_str(&alias.name);
            if alias.permutation.is_some() {
                line.push_str(":rev");
            }
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaError {
    DuplicateTag(String),
    UnknownTag {
        category: GrammarCategory,
        name: String,
    },
    UnknownCategory(String),
    UnknownSlotKind(String),
    InvalidSignature(String),
    Table {
        line: usize,
        message: String,
    },
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::DuplicateTag(name) => write!(f, "tag name `{name}` is already bound"),
            SchemaError::UnknownTag { category, name } => {
                write!(f, "unknown tag `{category}[{name}]`")
            }
            SchemaError::UnknownCategory(c) => write!(f, "unknown grammar category `{c}`"),
            SchemaError::UnknownSlotKind(k) => write!(f, "unknown slot kind `{k}`"),
            SchemaError::InvalidSignature(m) => write!(f, "invalid signature: {m}"),
            SchemaError::Table { line, message } => write!(f, "registry line {line}: {message}"),
        }
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Error)]
pub enum RegistryFileError {
    #[error("reading registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// How one spelling resolves.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Spelling {
    category: GrammarCategory,
    target: (GrammarCategory, String),
    permutation: Option<Vec<usize>>,
    alias: bool,
}

/// The outcome of a successful [`TagRegistry::lookup`].
#[derive(Debug, Clone)]
pub struct Resolution<'r> {
    pub signature: &'r TagSignature,
    /// Argument order to apply when rewriting the written form canonically.
    pub permutation: Option<&'r [usize]>,
    /// The alias spelling used, when the name was not the canonical one.
    pub alias: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Resolution<'_> {
    /// Reorders written arguments into canonical slot order.
    pub fn canonical_order<T: Clone>(&self, args: &[T]) -> Vec<T> {
        match self.permutation {
            Some(perm) if perm.len() == args.len() => {
                perm.iter().map(|&i| args[i].clone()).collect()
            }
            _ => args.to_vec(),
        }
    }
}

/// An immutable collection of tag signatures with case-insensitive lookup.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagRegistry {
    signatures: BTreeMap<(GrammarCategory, String), TagSignature>,
    spellings: BTreeMap<String, Vec<Spelling>>,
}

const DEFAULT_TABLE: &str = include_str!("default_registry.tsv");

/// All performatives and relations of the base annotation language.
pub fn default_registry() -> TagRegistry {
    TagRegistry::default()
        .extend_from_table(DEFAULT_TABLE)
        .expect("built-in registry table is well formed")
}

impl TagRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn signatures(&self) -> impl Iterator<Item = &TagSignature> {
        self.signatures.values()
    }

    pub fn signature(&self, category: GrammarCategory, name: &str) -> Option<&TagSignature> {
        self.signatures.get(&(category, name.to_ascii_lowercase()))
    }

    /// Returns a new registry containing `sig`. The receiver is left untouched.
    pub fn register_tag(&self, sig: TagSignature) -> Result<TagRegistry, SchemaError> {
        let mut next = self.clone();
        next.insert(sig)?;
        Ok(next)
    }

    fn insert(&mut self, sig: TagSignature) -> Result<(), SchemaError> {
        let key = (sig.category, sig.name.to_ascii_lowercase());
        let mut new_spellings = vec![(
            key.1.clone(),
            Spelling {
                category: sig.category,
                target: key.clone(),
                permutation: None,
                alias: false,
            },
        )];
        for alias in &sig.aliases {
            if !is_identifier(&alias.name) {
                return Err(SchemaError::InvalidSignature(format!(
                    "alias `{}` is not an identifier",
                    alias.name
                )));
            }
            if let Some(perm) = &alias.permutation {
                if !is_permutation(perm) || !sig.accepts_arity(perm.len()) {
                    return Err(SchemaError::InvalidSignature(format!(
                        "alias `{}` has an invalid argument permutation",
                        alias.name
                    )));
                }
            }
            new_spellings.push((
                alias.name.to_ascii_lowercase(),
                Spelling {
                    category: alias.category,
                    target: key.clone(),
                    permutation: alias.permutation.clone(),
                    alias: true,
                },
            ));
        }
        if self.signatures.contains_key(&key) {
            return Err(SchemaError::DuplicateTag(sig.name.clone()));
        }
        for (i, (name, spelling)) in new_spellings.iter().enumerate() {
            let taken_here = self
                .spellings
                .get(name)
                .is_some_and(|v| v.iter().any(|s| s.category == spelling.category));
            let taken_by_sibling = new_spellings[..i]
                .iter()
                .any(|(n, s)| n == name && s.category == spelling.category);
            if taken_here || taken_by_sibling {
                return Err(SchemaError::DuplicateTag(name.clone()));
            }
        }
        for (name, spelling) in new_spellings {
            let entry = self.spellings.entry(name).or_default();
            entry.push(spelling);
            entry.sort_by_key(|s| s.category);
        }
        self.signatures.insert(key, sig);
        Ok(())
    }

    /// Resolves `category[name]` case-insensitively.
    ///
    /// A spelling registered under the requested category wins. Otherwise
    /// the first spelling under any category is used and a
    /// category-mismatch warning is attached.
    pub fn lookup(
        &self,
        category: GrammarCategory,
        name: &str,
    ) -> Result<Resolution<'_>, SchemaError> {
        let lname = name.to_ascii_lowercase();
        let unknown = || SchemaError::UnknownTag {
            category,
            name: name.to_string(),
        };
        let candidates = self.spellings.get(&lname).ok_or_else(unknown)?;
        let (spelling, home) = match candidates.iter().find(|s| s.category == category) {
            Some(s) => (s, true),
            None => (candidates.first().ok_or_else(unknown)?, false),
        };
        let signature = &self.signatures[&spelling.target];
        let mut diagnostics = Vec::new();
        let respelled = spelling.alias && lname == spelling.target.1;
        if signature.category != category && (!home || respelled) {
            diagnostics.push(Diagnostic::warning(
                codes::CATEGORY_MISMATCH,
                format!(
                    "`{category}[{name}]` resolves to `{}[{}]`",
                    signature.category, signature.name
                ),
            ));
        }
        if respelled && spelling.permutation.is_some() {
            diagnostics.push(Diagnostic::warning(
                codes::ARGUMENT_ORDER,
                format!(
                    "arguments of `{category}[{name}]` are read in reverse of `{}[{}]` slot order",
                    signature.category, signature.name
                ),
            ));
        }
        Ok(Resolution {
            signature,
            permutation: spelling.permutation.as_deref(),
            alias: spelling
                .alias
                .then(|| lname.clone())
                .filter(|a| *a != spelling.target.1),
            diagnostics,
        })
    }

    /// Adds every signature from a registry table, returning a new registry.
    pub fn extend_from_table(&self, text: &str) -> Result<TagRegistry, SchemaError> {
        let mut next = self.clone();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let sig = parse_table_line(line).map_err(|e| SchemaError::Table {
                line: i + 1,
                message: e.to_string(),
            })?;
            next.insert(sig).map_err(|e| SchemaError::Table {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(next)
    }

    pub fn extend_from_file(
        &self,
        path: &std::path::Path,
    ) -> Result<TagRegistry, RegistryFileError> {
        let text = std::fs::read_to_string(path)?;
        Ok(self.extend_from_table(&text)?)
    }

    /// Serializes every signature in the registry table format.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# category name min max slots... aliases...\n");
        for sig in self.signatures.values() {
            out.push_str(&sig.to_table_line());
            out.push('\n');
        }
        out
    }
}

fn parse_table_line(line: &str) -> Result<TagSignature, SchemaError> {
    let mut tokens = line.split_whitespace();
    let bad = |m: &str| SchemaError::InvalidSignature(m.to_string());
    let category: GrammarCategory = tokens
        .next()
        .ok_or_else(|| bad("missing category"))?
        .parse()?;
    let name = tokens.next().ok_or_else(|| bad("missing tag name"))?;
    let min: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("missing or invalid min arity"))?;
    let max: Option<usize> = match tokens.next() {
        Some("*") => None,
        Some(t) => Some(t.parse().map_err(|_| bad("invalid max arity"))?),
        None => return Err(bad("missing max arity")),
    };

    let mut slots: Vec<(String, SlotKind)> = Vec::new();
    let mut aliases: Vec<(GrammarCategory, String, bool)> = Vec::new();
    for token in tokens {
        if let Some(spec) = token.strip_prefix("alias=") {
            let (spec, rev) = match spec.strip_suffix(":rev") {
                Some(s) => (s, true),
                None => (spec, false),
            };
            let (cat, alias) = match spec.split_once('/') {
                Some((c, a)) => (c.parse()?, a),
                None => (category, spec),
            };
            aliases.push((cat, alias.to_string(), rev));
        } else {
            let (symbol, kind) = match token.split_once(':') {
                Some((s, k)) => (Some(s.to_string()), k.parse::<SlotKind>()?),
                None => (None, token.parse::<SlotKind>()?),
            };
            let symbol = symbol.unwrap_or_else(|| {
                let used = slots.iter().filter(|(_, k)| *k == kind).count();
                kind.default_symbols()
                    .get(used)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("arg{}", slots.len() + 1))
            });
            slots.push((symbol, kind));
        }
    }
    if let Some(max) = max {
        if slots.len() != max {
            return Err(bad(&format!(
                "expected {max} slot kinds, found {}",
                slots.len()
            )));
        }
    } else if slots.is_empty() || slots.len() > min.max(1) {
        return Err(bad("variadic tags declare at most min-arity slots"));
    }

    let mut sig = match max {
        Some(_) => TagSignature::new(category, name, slots, min)?,
        None => TagSignature::variadic(category, name, slots, min)?,
    };
    for (cat, alias, rev) in aliases {
        let permutation = if rev {
            match sig.max_arity {
                Some(n) if n == sig.min_arity => Some((0..n).rev().collect()),
                _ => {
                    return Err(bad(&format!(
                        "`:rev` alias `{alias}` needs a fixed-arity tag"
                    )))
                }
            }
        } else {
            None
        };
        sig = sig.with_alias_in(cat, alias, permutation);
    }
    Ok(sig)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
}
