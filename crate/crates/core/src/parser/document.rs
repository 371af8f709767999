//! Line-oriented annotation files.
//!
//! ```text
//! #!iatc 1
//! % comment
//! @locution c1
//! perf[assert](rel[stronger](rel[not](prove_rtf),
//!                            rel[not](random_test_false)))
//! @analyst
//! rel[structural](random_test_false, prove_rtf)
//! #LEMMA := { struct[sums](x, y); rel[has_property](z, small) }
//! ```
//!
//! A stanza may continue over several lines while its brackets are open.

use thiserror::Error;

use super::stanza::parse_stanza;
use crate::diagnostic::{codes, Diagnostic, Position, SourceSpan};
use crate::schema::is_identifier;
use crate::term::Term;

pub const HEADER: &str = "#!iatc 1";

/// A parsed stanza with its anchoring metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stanza {
    pub term: Term,
    /// Locution the stanza is anchored to; `None` for analyst sections.
    pub anchor: Option<String>,
    pub unspoken: bool,
    /// Inserted by the analyst without an attached performative.
    pub analyst_inserted: bool,
    /// Name of the subgraph this stanza is a member of.
    pub subgraph: Option<String>,
    pub span: SourceSpan,
}

impl Stanza {
    pub fn new(term: Term) -> Self {
        let unspoken = root_is_unspoken(&term);
        Stanza {
            term,
            anchor: None,
            unspoken,
            analyst_inserted: false,
            subgraph: None,
            span: SourceSpan::default(),
        }
    }

    pub fn anchored(term: Term, anchor: impl Into<String>) -> Self {
        Stanza {
            anchor: Some(anchor.into()),
            ..Stanza::new(term)
        }
    }

    pub fn analyst(term: Term) -> Self {
        Stanza {
            analyst_inserted: true,
            ..Stanza::new(term)
        }
    }
}

fn root_is_unspoken(term: &Term) -> bool {
    term.as_application()
        .is_some_and(|a| a.has_attribute("unspoken"))
}

/// `#NAME := { ... }`: a named group of member stanzas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphDef {
    pub name: String,
    pub members: Vec<Stanza>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationDocument {
    pub stanzas: Vec<Stanza>,
    pub subgraphs: Vec<SubgraphDef>,
    /// Recoverable problems; each offending stanza was skipped.
    pub diagnostics: Vec<Diagnostic>,
}

impl AnnotationDocument {
    /// Top-level stanzas followed by every subgraph member.
    pub fn all_stanzas(&self) -> impl Iterator<Item = &Stanza> {
        self.stanzas
            .iter()
            .chain(self.subgraphs.iter().flat_map(|s| s.members.iter()))
    }

    pub fn subgraph(&self, name: &str) -> Option<&SubgraphDef> {
        self.subgraphs.iter().find(|s| s.name == name)
    }

    /// Appends another document, as when several files form one corpus.
    pub fn extend(&mut self, other: AnnotationDocument) {
        self.stanzas.extend(other.stanzas);
        self.subgraphs.extend(other.subgraphs);
        self.diagnostics.extend(other.diagnostics);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FatalFormatError {
    #[error("missing `{HEADER}` header line")]
    MissingHeader,
    #[error("unsupported annotation format version `{0}`")]
    UnsupportedVersion(String),
}

/// Text of one stanza candidate and the source positions of its lines.
struct Chunk {
    text: String,
    /// (byte offset in `text`, line, column of that byte)
    lines: Vec<(usize, usize, usize)>,
}

impl Chunk {
    fn start(line_no: usize, line: &str) -> Chunk {
        let trimmed = line.trim_start();
        let column = line[..line.len() - trimmed.len()].chars().count() + 1;
        Chunk {
            text: trimmed.to_string(),
            lines: vec![(0, line_no, column)],
        }
    }

    fn push_line(&mut self, line_no: usize, line: &str) {
        self.text.push('\n');
        self.lines.push((self.text.len(), line_no, 1));
        self.text.push_str(line);
    }

    fn open_brackets(&self) -> i64 {
        self.text.chars().fold(0, |depth, c| match c {
            '(' | '{' => depth + 1,
            ')' | '}' => depth - 1,
            _ => depth,
        })
    }

    fn position(&self, offset: usize) -> Position {
        let offset = offset.min(self.text.len());
        let &(start, line, column) = self
            .lines
            .iter()
            .rev()
            .find(|(o, _, _)| *o <= offset)
            .unwrap_or(&self.lines[0]);
        Position::new(line, column + self.text[start..offset].chars().count())
    }

    /// Span of the non-blank text in `start..end`.
    fn span(&self, start: usize, end: usize) -> SourceSpan {
        let slice = &self.text[start..end];
        let lead = slice.len() - slice.trim_start().len();
        let trail = slice.len() - slice.trim_end().len();
        let (s, e) = (start + lead, (end - trail).max(start + lead));
        SourceSpan::new(self.position(s), self.position(e))
    }

    fn error_span(&self, stanza: SourceSpan, offset: usize) -> SourceSpan {
        let at = self.position(offset).min(stanza.end).max(stanza.start);
        let end = Position::new(at.line, at.column + 1)
            .min(stanza.end)
            .max(at);
        SourceSpan::new(at, end)
    }
}

#[derive(Default)]
struct Section {
    anchor: Option<String>,
    analyst: bool,
}

/// Parses an annotation document. Only an unreadable header is fatal; any
/// other problem becomes a diagnostic and skips the offending stanza.
pub fn parse_annotation_file(doc: &str) -> Result<AnnotationDocument, FatalFormatError> {
    let mut lines = doc.lines().enumerate().map(|(i, l)| (i + 1, l));
    loop {
        match lines.next() {
            None => return Err(FatalFormatError::MissingHeader),
            Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('%') => continue,
            Some((_, l)) => {
                let l = l.trim();
                if l == HEADER {
                    break;
                }
                return match l.strip_prefix("#!iatc") {
                    Some(v) if !v.trim().is_empty() => {
                        Err(FatalFormatError::UnsupportedVersion(v.trim().into()))
                    }
                    _ => Err(FatalFormatError::MissingHeader),
                };
            }
        }
    }

    let mut out = AnnotationDocument::default();
    let mut section = Section::default();
    let mut pending: Option<Chunk> = None;
    for (line_no, line) in lines {
        let trimmed = line.trim();
        if let Some(chunk) = pending.as_mut() {
            if trimmed.starts_with('%') {
                continue;
            }
            if !trimmed.starts_with('@') {
                chunk.push_line(line_no, line);
                if chunk.open_brackets() <= 0 {
                    finish(pending.take().unwrap(), &section, &mut out);
                }
                continue;
            }
            finish(pending.take().unwrap(), &section, &mut out);
        }
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('@') {
            directive(line_no, line, &mut section, &mut out);
            continue;
        }
        let chunk = Chunk::start(line_no, line);
        if chunk.open_brackets() <= 0 {
            finish(chunk, &section, &mut out);
        } else {
            pending = Some(chunk);
        }
    }
    if let Some(chunk) = pending {
        finish(chunk, &section, &mut out);
    }
    Ok(out)
}

fn directive(line_no: usize, line: &str, section: &mut Section, out: &mut AnnotationDocument) {
    let chunk = Chunk::start(line_no, line);
    let span = chunk.span(0, chunk.text.len());
    let mut words = chunk.text.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("@locution"), Some(id), None) => {
            *section = Section {
                anchor: Some(id.to_string()),
                analyst: false,
            };
        }
        (Some("@analyst"), None, _) => {
            *section = Section {
                anchor: None,
                analyst: true,
            };
        }
        (Some(d @ ("@locution" | "@analyst")), _, _) => out.diagnostics.push(
            Diagnostic::error(codes::DIRECTIVE, format!("malformed `{d}` directive"))
                .with_span(span),
        ),
        (Some(d), _, _) => out.diagnostics.push(
            Diagnostic::error(codes::DIRECTIVE, format!("unknown directive `{d}`")).with_span(span),
        ),
        _ => {}
    }
}

fn finish(chunk: Chunk, section: &Section, out: &mut AnnotationDocument) {
    if let Some((name, body_start, body_end)) = subgraph_header(&chunk.text) {
        let span = chunk.span(0, chunk.text.len());
        let (Some(body_start), Some(body_end)) = (body_start, body_end) else {
            out.diagnostics.push(
                Diagnostic::error(
                    codes::SYNTAX,
                    format!("subgraph `#{name}` needs a `{{ ... }}` body"),
                )
                .with_span(span),
            );
            return;
        };
        if out.subgraph(&name).is_some() {
            out.diagnostics.push(
                Diagnostic::error(
                    codes::DUPLICATE_SUBGRAPH,
                    format!("subgraph `#{name}` is defined twice"),
                )
                .with_span(span),
            );
            return;
        }
        let mut members = Vec::new();
        for (start, end) in split_members(&chunk.text, body_start, body_end) {
            if chunk.text[start..end].trim().is_empty() {
                continue;
            }
            if let Some(mut stanza) = stanza_at(&chunk, start, end, section, out) {
                stanza.subgraph = Some(name.clone());
                members.push(stanza);
            }
        }
        out.subgraphs.push(SubgraphDef {
            name,
            members,
            span,
        });
        return;
    }
    if let Some(stanza) = stanza_at(&chunk, 0, chunk.text.len(), section, out) {
        out.stanzas.push(stanza);
    }
}

fn stanza_at(
    chunk: &Chunk,
    start: usize,
    end: usize,
    section: &Section,
    out: &mut AnnotationDocument,
) -> Option<Stanza> {
    let span = chunk.span(start, end);
    match parse_stanza(&chunk.text[start..end]) {
        Ok(term) => Some(Stanza {
            unspoken: root_is_unspoken(&term),
            term,
            anchor: section.anchor.clone(),
            analyst_inserted: section.analyst,
            subgraph: None,
            span,
        }),
        Err(e) => {
            out.diagnostics.push(
                Diagnostic::error(codes::SYNTAX, e.message)
                    .with_span(chunk.error_span(span, start + e.offset)),
            );
            None
        }
    }
}

/// Recognizes `#NAME :=` and locates the brace-delimited body, returning
/// byte offsets just inside the braces.
fn subgraph_header(text: &str) -> Option<(String, Option<usize>, Option<usize>)> {
    let rest = text.strip_prefix('#')?;
    let name_len = rest
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(rest.len());
    let name = &rest[..name_len];
    if !is_identifier(name) {
        return None;
    }
    let after = &rest[name_len..];
    let body = after.trim_start().strip_prefix(":=")?;
    let open = body.trim_start();
    let start = open.starts_with('{').then(|| text.len() - open.len() + 1);
    let end = text
        .trim_end()
        .strip_suffix('}')
        .map(str::len)
        .filter(|&e| start.is_some_and(|s| e >= s));
    Some((name.to_string(), start, end))
}

fn split_members(text: &str, start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i64;
    let mut from = start;
    for (i, c) in text[start..end].char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ';' if depth == 0 => {
                out.push((from, start + i));
                from = start + i + 1;
            }
            _ => {}
        }
    }
    out.push((from, end));
    out
}
