//! Recursive-descent parser for the linear stanza notation.
//!
//! ```text
//! node := CATEGORY '[' TAG (':' ATTR)* ']' '(' node (',' node)* ')'
//!       | '{' node (',' node)* '}'
//!       | '#' IDENT
//!       | atom
//! ```
//!
//! An atom is free text with balanced brackets, ending at the first comma
//! or closing bracket at its own nesting level.

use std::fmt;

use crate::schema::{GrammarCategory, TagRegistry};
use crate::term::{Application, Atom, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset into the stanza text.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at offset {}: {}",
            self.offset, self.message
        )
    }
}

impl std::error::Error for SyntaxError {}

/// Parses a single stanza into its expression tree.
pub fn parse_stanza(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { src: text, pos: 0 };
    let term = p.node(Context::Top)?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        let message = match c {
            ')' | '}' => format!("unbalanced `{c}`"),
            _ => format!("unexpected `{c}` after end of stanza"),
        };
        return Err(p.error(message));
    }
    Ok(term)
}

/// Prints a term exactly as written, with normalized spacing.
pub fn print_stanza(term: &Term) -> String {
    term.to_string()
}

/// Prints a term with canonical tag spellings and slot order.
pub fn print_canonical(term: &Term, registry: &TagRegistry) -> String {
    term.canonicalize(registry).0.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Context {
    Top,
    Args,
    Set,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("unbalanced: expected `{want}` before end of input"))),
        }
    }

    fn identifier(&mut self) -> Option<&'a str> {
        let rest = &self.src[self.pos..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Some(&rest[..end])
    }

    fn node(&mut self, ctx: Context) -> Result<Term, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error(match ctx {
                Context::Top => "empty stanza",
                _ => "unbalanced: input ends inside an argument list",
            })),
            Some(',') | Some(')') | Some('}') if ctx != Context::Top => {
                Err(self.error("empty argument"))
            }
            Some('{') => self.set(),
            Some('#') => {
                self.bump();
                match self.identifier() {
                    Some(name) => Ok(Term::SubgraphRef(name.to_string())),
                    None => Err(self.error("expected a subgraph name after `#`")),
                }
            }
            Some(_) => {
                let start = self.pos;
                if let Some(word) = self.identifier() {
                    if self.peek() == Some('[') {
                        if let Ok(category) = word.parse::<GrammarCategory>() {
                            return self.application(category);
                        }
                    }
                }
                self.pos = start;
                self.atom(ctx)
            }
        }
    }

    fn application(&mut self, category: GrammarCategory) -> Result<Term, SyntaxError> {
        self.expect('[')?;
        self.skip_ws();
        let tag = self
            .identifier()
            .ok_or_else(|| self.error("expected a tag name"))?
            .to_string();
        let mut attributes = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(':') => {
                    self.bump();
                    self.skip_ws();
                    let attr = self
                        .identifier()
                        .ok_or_else(|| self.error("expected an attribute name"))?;
                    attributes.push(attr.to_string());
                }
                _ => break,
            }
        }
        self.expect(']')?;
        self.skip_ws();
        self.expect('(')?;
        let args = self.list(Context::Args, ')')?;
        Ok(Term::Application(Application {
            category,
            tag,
            attributes,
            args,
        }))
    }

    fn set(&mut self) -> Result<Term, SyntaxError> {
        self.expect('{')?;
        Ok(Term::Set(self.list(Context::Set, '}')?))
    }

    fn list(&mut self, ctx: Context, close: char) -> Result<Vec<Term>, SyntaxError> {
        let mut items = vec![self.node(ctx)?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                    items.push(self.node(ctx)?);
                }
                Some(c) if c == close => {
                    self.bump();
                    return Ok(items);
                }
                Some(c) => {
                    return Err(self.error(format!("expected `,` or `{close}`, found `{c}`")))
                }
                None => return Err(self.error(format!("unbalanced: missing `{close}`"))),
            }
        }
    }

    fn atom(&mut self, ctx: Context) -> Result<Term, SyntaxError> {
        let start = self.pos;
        let mut open: Vec<(char, usize)> = Vec::new();
        while let Some(c) = self.peek() {
            match c {
                '(' | '{' => open.push((c, self.pos)),
                ')' | '}' => {
                    let want = if c == ')' { '(' } else { '{' };
                    match open.last() {
                        Some(&(o, _)) if o == want => {
                            open.pop();
                        }
                        Some(_) => return Err(self.error(format!("mismatched `{c}` inside atom"))),
                        None => match (ctx, c) {
                            (Context::Args, ')') | (Context::Set, '}') => break,
                            _ => return Err(self.error(format!("unbalanced `{c}`"))),
                        },
                    }
                }
                ',' if open.is_empty() => {
                    if ctx == Context::Top {
                        return Err(self.error("top-level comma outside an argument list"));
                    }
                    break;
                }
                _ => {}
            }
            self.bump();
        }
        if let Some(&(c, at)) = open.last() {
            return Err(SyntaxError {
                offset: at,
                message: format!("unbalanced `{c}` inside atom"),
            });
        }
        Atom::new(&self.src[start..self.pos])
            .map(Term::Atom)
            .ok_or_else(|| SyntaxError {
                offset: start,
                message: "empty argument".into(),
            })
    }
}
