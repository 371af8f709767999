use std::collections::{BTreeMap, BTreeSet};

use super::document::{AnnotationDocument, Stanza};
use crate::diagnostic::{codes, Diagnostic};
use crate::schema::{GrammarCategory, SlotKind, SlotRole, TagRegistry};
use crate::term::Term;

const KNOWN_ATTRIBUTES: &[&str] = &["unspoken"];

/// Checks one stanza against the registry. Never fails; every finding is
/// returned as a diagnostic carrying the stanza's span.
pub fn validate(stanza: &Stanza, registry: &TagRegistry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_root(stanza, registry, &mut out);
    check_term(&stanza.term, None, registry, &mut out);
    for d in &mut out {
        d.span = Some(stanza.span);
    }
    out
}

/// Validates every stanza of a document plus its subgraph references.
/// Parse diagnostics already recorded on the document come first.
pub fn validate_document(doc: &AnnotationDocument, registry: &TagRegistry) -> Vec<Diagnostic> {
    let mut out = doc.diagnostics.clone();
    let defined: BTreeSet<&str> = doc.subgraphs.iter().map(|s| s.name.as_str()).collect();
    for stanza in doc.all_stanzas() {
        out.extend(validate(stanza, registry));
        for name in stanza.term.subgraph_refs() {
            if !defined.contains(name) {
                out.push(
                    Diagnostic::error(codes::UNBOUND_SUBGRAPH, format!("`#{name}` is not defined"))
                        .with_span(stanza.span),
                );
            }
        }
    }
    for def in &doc.subgraphs {
        if reaches(doc, &def.name, &def.name) {
            out.push(
                Diagnostic::error(
                    codes::CYCLIC_SUBGRAPH,
                    format!("subgraph `#{}` contains itself", def.name),
                )
                .with_span(def.span),
            );
        }
    }
    out
}

/// Whether subgraph `from` refers, directly or transitively, to `target`.
fn reaches(doc: &AnnotationDocument, from: &str, target: &str) -> bool {
    let edges: BTreeMap<&str, Vec<&str>> = doc
        .subgraphs
        .iter()
        .map(|s| {
            (
                s.name.as_str(),
                s.members
                    .iter()
                    .flat_map(|m| m.term.subgraph_refs())
                    .collect(),
            )
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&str> = edges.get(from).cloned().unwrap_or_default();
    while let Some(next) = stack.pop() {
        if next == target {
            return true;
        }
        if seen.insert(next) {
            stack.extend(edges.get(next).into_iter().flatten());
        }
    }
    false
}

fn check_root(stanza: &Stanza, registry: &TagRegistry, out: &mut Vec<Diagnostic>) {
    if stanza.analyst_inserted || stanza.subgraph.is_some() {
        return;
    }
    match &stanza.term {
        Term::Application(app) => {
            if let Ok(res) = registry.lookup(app.category, &app.tag) {
                if res.signature.category != GrammarCategory::Perf {
                    out.push(Diagnostic::error(
                        codes::ROOT_CATEGORY,
                        format!(
                            "stanza root `{}[{}]` is not a performative; place it in an `@analyst` section",
                            app.category, app.tag
                        ),
                    ));
                }
            }
        }
        _ => out.push(Diagnostic::error(
            codes::ROOT_CATEGORY,
            "stanza root must be a tagged performative",
        )),
    }
}

fn check_term(
    term: &Term,
    slot: Option<&SlotRole>,
    registry: &TagRegistry,
    out: &mut Vec<Diagnostic>,
) {
    match term {
        Term::Atom(_) | Term::SubgraphRef(_) => {}
        Term::Set(members) => {
            if slot.is_some_and(|s| s.kind != SlotKind::Set) || slot.is_none() {
                let place =
                    slot.map_or_else(|| "here".to_string(), |s| format!("in slot `{}`", s.name));
                out.push(Diagnostic::warning(
                    codes::SET_IN_NON_SET_SLOT,
                    format!("set argument not expected {place}"),
                ));
            }
            for m in members {
                check_term(m, None, registry, out);
            }
        }
        Term::Application(app) => {
            for attr in &app.attributes {
                let known = KNOWN_ATTRIBUTES
                    .iter()
                    .any(|k| k.eq_ignore_ascii_case(attr));
                if !known || app.category != GrammarCategory::Perf {
                    out.push(Diagnostic::warning(
                        codes::UNKNOWN_ATTRIBUTE,
                        format!(
                            "attribute `{attr}` has no meaning on `{}[{}]`",
                            app.category, app.tag
                        ),
                    ));
                }
            }
            let res = match registry.lookup(app.category, &app.tag) {
                Ok(res) => res,
                Err(e) => {
                    out.push(Diagnostic::error(codes::UNKNOWN_TAG, e.to_string()));
                    for a in &app.args {
                        check_term(a, None, registry, out);
                    }
                    return;
                }
            };
            out.extend(res.diagnostics.iter().cloned());
            let sig = res.signature;
            let n = app.args.len();
            if !sig.accepts_arity(n) {
                out.push(Diagnostic::error(
                    codes::ARITY,
                    format!(
                        "`{}[{}]` takes {} argument(s), found {n}",
                        sig.category,
                        sig.name,
                        sig.describe_arity()
                    ),
                ));
            }
            if sig.category == GrammarCategory::Perf
                && sig.name == "Judge"
                && !app.args.iter().any(|a| contains_value(a, registry))
            {
                out.push(Diagnostic::warning(
                    codes::JUDGE_WITHOUT_VALUE,
                    "`Judge` argument contains no `value[...]` judgement",
                ));
            }
            let order = res.canonical_order(&(0..n).collect::<Vec<_>>());
            for (canonical, &written) in order.iter().enumerate() {
                check_term(&app.args[written], sig.slot(canonical), registry, out);
            }
        }
    }
}

fn contains_value(term: &Term, registry: &TagRegistry) -> bool {
    term.applications().any(|a| {
        registry
            .lookup(a.category, &a.tag)
            .map_or(a.category == GrammarCategory::Value, |r| {
                r.signature.category == GrammarCategory::Value
            })
    })
}
