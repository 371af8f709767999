//! Expression trees for single stanzas.

use std::fmt;

use crate::diagnostic::Diagnostic;
use crate::schema::{GrammarCategory, TagRegistry};

/// Collapses internal whitespace runs to one space and trims the ends.
pub fn normalize_atom_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Opaque content text. Never empty; whitespace is normalized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(text: &str) -> Option<Atom> {
        let norm = normalize_atom_text(text);
        (!norm.is_empty()).then_some(Atom(norm))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Application {
    pub category: GrammarCategory,
    pub tag: String,
    /// Colon-separated markers inside the bracket, e.g. `unspoken`.
    pub attributes: Vec<String>,
    pub args: Vec<Term>,
}

impl Application {
    pub fn new(category: GrammarCategory, tag: impl Into<String>, args: Vec<Term>) -> Self {
        Application {
            category,
            tag: tag.into(),
            attributes: Vec::new(),
            args,
        }
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.attributes.iter().any(|a| a.eq_ignore_ascii_case(name))
    }

    /// Same head: category, tag (case-insensitive), attributes and arity.
    pub fn same_head(&self, other: &Application) -> bool {
        self.category == other.category
            && self.tag.eq_ignore_ascii_case(&other.tag)
            && self.attributes == other.attributes
            && self.args.len() == other.args.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(Atom),
    Application(Application),
    /// Braced set of one or more members.
    Set(Vec<Term>),
    /// `#NAME`, a reference to a nested subgraph.
    SubgraphRef(String),
}

impl Term {
    /// Builds an atom term, panicking on empty text. Intended for literals.
    pub fn atom(text: &str) -> Term {
        Term::Atom(Atom::new(text).expect("atom text must not be empty"))
    }

    pub fn app(category: GrammarCategory, tag: &str, args: Vec<Term>) -> Term {
        Term::Application(Application::new(category, tag, args))
    }

    pub fn as_application(&self) -> Option<&Application> {
        match self {
            Term::Application(app) => Some(app),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::SubgraphRef(_))
    }

    pub fn children(&self) -> &[Term] {
        match self {
            Term::Application(app) => &app.args,
            Term::Set(members) => members,
            _ => &[],
        }
    }

    /// Pre-order traversal over every node of the tree.
    pub fn walk(&self) -> impl Iterator<Item = &Term> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(next.children().iter().rev());
            Some(next)
        })
    }

    pub fn applications(&self) -> impl Iterator<Item = &Application> {
        self.walk().filter_map(Term::as_application)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.walk().filter_map(|t| match t {
            Term::Atom(a) => Some(a),
            _ => None,
        })
    }

    pub fn subgraph_refs(&self) -> impl Iterator<Item = &str> {
        self.walk().filter_map(|t| match t {
            Term::SubgraphRef(name) => Some(name.as_str()),
            _ => None,
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        self.walk().count()
    }

    /// Applications and sets, i.e. nodes with structure below them.
    pub fn structural_size(&self) -> usize {
        self.walk().filter(|t| !t.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(Term::depth).max().unwrap_or(0)
    }

    /// Subterm at a child-index path, if it exists.
    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &i| t.children().get(i))
    }

    /// Rewrites every resolvable tag to its canonical category and spelling,
    /// reordering arguments of permuted aliases. Unknown tags are left as
    /// written; lookup lints are collected into the returned list.
    pub fn canonicalize(&self, registry: &TagRegistry) -> (Term, Vec<Diagnostic>) {
        let mut diagnostics = Vec::new();
        let term = self.canonicalize_into(registry, &mut diagnostics);
        (term, diagnostics)
    }

    fn canonicalize_into(&self, registry: &TagRegistry, out: &mut Vec<Diagnostic>) -> Term {
        match self {
            Term::Application(app) => {
                let args: Vec<Term> = app
                    .args
                    .iter()
                    .map(|a| a.canonicalize_into(registry, out))
                    .collect();
                match registry.lookup(app.category, &app.tag) {
                    Ok(res) => {
                        out.extend(res.diagnostics.iter().cloned());
                        Term::Application(Application {
                            category: res.signature.category,
                            tag: res.signature.name.clone(),
                            attributes: app.attributes.clone(),
                            args: res.canonical_order(&args),
                        })
                    }
                    Err(_) => Term::Application(Application {
                        args,
                        ..app.clone()
                    }),
                }
            }
            Term::Set(members) => Term::Set(
                members
                    .iter()
                    .map(|m| m.canonicalize_into(registry, out))
                    .collect(),
            ),
            leaf => leaf.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => f.write_str(a.as_str()),
            Term::SubgraphRef(name) => write!(f, "#{name}"),
            Term::Set(members) => {
                f.write_str("{")?;
                write_list(f, members)?;
                f.write_str("}")
            }
            Term::Application(app) => {
                write!(f, "{}[{}", app.category, app.tag)?;
                for attr in &app.attributes {
                    write!(f, ":{attr}")?;
                }
                f.write_str("](")?;
                write_list(f, &app.args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Term]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
