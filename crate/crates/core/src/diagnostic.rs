use std::fmt;

/// A 1-based line/column position in an annotation document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn new(line: usize, column: usize) -> Self {
        Position { line, column }
    }
}

/// Inclusive start, exclusive end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SourceSpan {
    pub start: Position,
    pub end: Position,
}

impl SourceSpan {
    pub fn new(start: Position, end: Position) -> Self {
        SourceSpan { start, end }
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start.line, self.start.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// A lint or error produced while resolving, parsing or validating annotations.
///
/// Diagnostics produced by registry lookups carry no span; the validator
/// attaches the span of the stanza being checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = &self.span {
            write!(f, "{}: ", span)?;
        }
        write!(f, "{}[{}]: {}", self.severity, self.code, self.message)
    }
}

/// Diagnostic codes emitted by this crate.
pub mod codes {
    pub const SYNTAX: &str = "syntax";
    pub const UNKNOWN_TAG: &str = "unknown-tag";
    pub const ARITY: &str = "arity";
    pub const ROOT_CATEGORY: &str = "root-category";
    pub const JUDGE_WITHOUT_VALUE: &str = "judge-without-value";
    pub const SET_IN_NON_SET_SLOT: &str = "set-outside-set-slot";
    pub const CATEGORY_MISMATCH: &str = "category-mismatch";
    pub const ARGUMENT_ORDER: &str = "argument-order";
    pub const UNKNOWN_ATTRIBUTE: &str = "unknown-attribute";
    pub const DIRECTIVE: &str = "directive";
    pub const DUPLICATE_SUBGRAPH: &str = "duplicate-subgraph";
    pub const UNBOUND_SUBGRAPH: &str = "unbound-subgraph";
    pub const CYCLIC_SUBGRAPH: &str = "cyclic-subgraph";
}
