//! Typed argument graph over a shared content layer.
//!
//! Atoms are unified by normalized text across every stanza. Expression
//! and performative nodes are created per occurrence, so two speakers
//! asserting the same relation stay distinct discourse events.

mod export;
mod query;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::Dialogue;
use crate::parser::Stanza;
use crate::schema::{GrammarCategory, TagRegistry};
use crate::term::Term;

pub use export::{export, to_dot, to_graphml, to_json, ExportFormat};
pub use query::{ComponentPartition, UnknownAtom};

pub type NodeId = usize;

/// Role label of the edge from a subgraph node to its member roots.
pub const MEMBER_ROLE: &str = "member";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeKind {
    Atom {
        text: String,
    },
    Expr {
        category: GrammarCategory,
        tag: String,
    },
    Performative {
        tag: String,
        locution: Option<String>,
        unspoken: bool,
    },
    Subgraph {
        name: String,
    },
}

impl NodeKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            NodeKind::Atom { .. } => "atom",
            NodeKind::Expr { .. } => "expr",
            NodeKind::Performative { .. } => "performative",
            NodeKind::Subgraph { .. } => "subgraph",
        }
    }

    /// Short human-readable label used by the exporters.
    pub fn label(&self) -> String {
        match self {
            NodeKind::Atom { text } => text.clone(),
            NodeKind::Expr { category, tag } => format!("{category}[{tag}]"),
            NodeKind::Performative {
                tag,
                locution: Some(loc),
                ..
            } => format!("perf[{tag}] @{loc}"),
            NodeKind::Performative {
                tag,
                locution: None,
                ..
            } => format!("perf[{tag}]"),
            NodeKind::Subgraph { name } => format!("#{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    #[serde(flatten)]
    pub kind: NodeKind,
    /// Subgraph node whose member stanzas produced this node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArgGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(skip)]
    atom_index: BTreeMap<String, NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("stanza anchored to unknown locution `{0}`")]
    DanglingAnchor(String),
    #[error("reference to undefined subgraph `#{0}`")]
    UnboundSubgraphRef(String),
    #[error("subgraph `#{0}` is nested inside itself")]
    CyclicSubgraph(String),
    #[error("unknown tag `{category}[{tag}]`")]
    UnknownTag {
        category: GrammarCategory,
        tag: String,
    },
}

/// Compiles stanzas into one graph. Subgraph members are recognised by
/// their `subgraph` field; pass top-level stanzas and members together.
/// Anchors are checked against `dialogue` when one is given.
pub fn build_graph<'a>(
    stanzas: impl IntoIterator<Item = &'a Stanza>,
    dialogue: Option<&Dialogue>,
    registry: &TagRegistry,
) -> Result<ArgGraph, GraphError> {
    let stanzas: Vec<&Stanza> = stanzas.into_iter().collect();
    check_nesting(&stanzas)?;

    let mut g = ArgGraph::default();
    let mut subgraphs = BTreeMap::new();
    for name in stanzas.iter().filter_map(|s| s.subgraph.as_deref()) {
        if !subgraphs.contains_key(name) {
            let id = g.add_node(
                NodeKind::Subgraph {
                    name: name.to_string(),
                },
                None,
            );
            subgraphs.insert(name.to_string(), id);
        }
    }

    let mut builder = Builder {
        g,
        registry,
        subgraphs,
    };
    for stanza in stanzas {
        if let (Some(anchor), Some(d)) = (&stanza.anchor, dialogue) {
            if !d.contains(anchor) {
                return Err(GraphError::DanglingAnchor(anchor.clone()));
            }
        }
        let owner = stanza.subgraph.as_ref().map(|name| builder.subgraphs[name]);
        let roots = builder.stanza_roots(stanza, owner)?;
        if let Some(sub) = owner {
            for root in roots {
                builder.g.add_edge(sub, root, MEMBER_ROLE);
            }
        }
    }
    Ok(builder.g)
}

/// Rejects subgraphs that reach themselves through `#NAME` references.
fn check_nesting(stanzas: &[&Stanza]) -> Result<(), GraphError> {
    let mut refs: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for s in stanzas {
        if let Some(name) = s.subgraph.as_deref() {
            refs.entry(name).or_default().extend(s.term.subgraph_refs());
        }
    }
    for s in stanzas {
        if let Some(missing) = s.term.subgraph_refs().find(|r| !refs.contains_key(r)) {
            return Err(GraphError::UnboundSubgraphRef(missing.to_string()));
        }
    }
    for &start in refs.keys() {
        let mut stack: Vec<&str> = refs[start].iter().copied().collect();
        let mut seen = BTreeSet::new();
        while let Some(next) = stack.pop() {
            if next == start {
                return Err(GraphError::CyclicSubgraph(start.to_string()));
            }
            if seen.insert(next) {
                stack.extend(refs[next].iter().copied());
            }
        }
    }
    Ok(())
}

struct Builder<'r> {
    g: ArgGraph,
    registry: &'r TagRegistry,
    subgraphs: BTreeMap<String, NodeId>,
}

impl Builder<'_> {
    fn stanza_roots(
        &mut self,
        stanza: &Stanza,
        owner: Option<NodeId>,
    ) -> Result<Vec<NodeId>, GraphError> {
        match &stanza.term {
            Term::Application(app) if app.category == GrammarCategory::Perf => {
                let (tag, _) = self.resolve(app.category, &app.tag)?;
                let kind = NodeKind::Performative {
                    tag,
                    locution: stanza.anchor.clone(),
                    unspoken: stanza.unspoken,
                };
                let id = self.g.add_node(kind, owner);
                self.arguments(id, app.category, &app.tag, &app.args, owner)?;
                Ok(vec![id])
            }
            term => {
                let mut roots = Vec::new();
                self.flatten(term, owner, &mut roots)?;
                Ok(roots)
            }
        }
    }

    fn term(&mut self, term: &Term, owner: Option<NodeId>) -> Result<NodeId, GraphError> {
        match term {
            Term::Atom(a) => Ok(self.g.atom_node(a.as_str())),
            Term::SubgraphRef(name) => self
                .subgraphs
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnboundSubgraphRef(name.clone())),
            Term::Application(app) => {
                let (tag, category) = self.resolve(app.category, &app.tag)?;
                let id = self.g.add_node(NodeKind::Expr { category, tag }, owner);
                self.arguments(id, app.category, &app.tag, &app.args, owner)?;
                Ok(id)
            }
            Term::Set(_) => unreachable!("sets are flattened by the caller"),
        }
    }

    fn arguments(
        &mut self,
        parent: NodeId,
        category: GrammarCategory,
        tag: &str,
        args: &[Term],
        owner: Option<NodeId>,
    ) -> Result<(), GraphError> {
        let res = self
            .registry
            .lookup(category, tag)
            .expect("resolved by caller");
        let ordered = res.canonical_order(args);
        let sig = res.signature;
        for (i, arg) in ordered.iter().enumerate() {
            let role = sig
                .slot(i)
                .map_or_else(|| format!("arg{i}"), |s| s.name.clone());
            let mut children = Vec::new();
            self.flatten(arg, owner, &mut children)?;
            for child in children {
                self.g.add_edge(parent, child, &role);
            }
        }
        Ok(())
    }

    /// Sets have no node of their own; their members hang off the slot.
    fn flatten(
        &mut self,
        term: &Term,
        owner: Option<NodeId>,
        out: &mut Vec<NodeId>,
    ) -> Result<(), GraphError> {
        match term {
            Term::Set(members) => {
                for m in members {
                    self.flatten(m, owner, out)?;
                }
            }
            _ => out.push(self.term(term, owner)?),
        }
        Ok(())
    }

    fn resolve(
        &self,
        category: GrammarCategory,
        tag: &str,
    ) -> Result<(String, GrammarCategory), GraphError> {
        self.registry
            .lookup(category, tag)
            .map(|r| (r.signature.name.clone(), r.signature.category))
            .map_err(|_| GraphError::UnknownTag {
                category,
                tag: tag.to_string(),
            })
    }
}

impl ArgGraph {
    pub fn new() -> Self {
        ArgGraph::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The node for a normalized atom text, if present.
    pub fn atom(&self, text: &str) -> Option<NodeId> {
        self.atom_index
            .get(&crate::term::normalize_atom_text(text))
            .copied()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&str, NodeId)> {
        self.atom_index.iter().map(|(t, &id)| (t.as_str(), id))
    }

    pub fn subgraph_node(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| matches!(&n.kind, NodeKind::Subgraph { name: s } if s == name))
    }

    pub fn out_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == id)
    }

    pub fn in_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.target == id)
    }

    /// Nodes of an owned subgraph, in creation order.
    pub fn owned_by(&self, subgraph: NodeId) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.owner == Some(subgraph))
    }

    fn add_node(&mut self, kind: NodeKind, owner: Option<NodeId>) -> NodeId {
        let id = self.nodes.len();
        if let NodeKind::Atom { text } = &kind {
            self.atom_index.insert(text.clone(), id);
        }
        self.nodes.push(Node { id, kind, owner });
        id
    }

    fn atom_node(&mut self, text: &str) -> NodeId {
        match self.atom_index.get(text) {
            Some(&id) => id,
            None => self.add_node(
                NodeKind::Atom {
                    text: text.to_string(),
                },
                None,
            ),
        }
    }

    fn add_edge(&mut self, source: NodeId, target: NodeId, role: &str) {
        self.edges.push(Edge {
            source,
            target,
            role: role.to_string(),
        });
    }

    /// Rebuilds the atom index after deserialization.
    pub fn reindex(&mut self) {
        self.atom_index = self
            .nodes
            .iter()
            .filter_map(|n| match &n.kind {
                NodeKind::Atom { text } => Some((text.clone(), n.id)),
                _ => None,
            })
            .collect();
    }
}

/// Unifies atoms by text; every other node of `b` is copied as new.
pub fn merge(a: &ArgGraph, b: &ArgGraph) -> ArgGraph {
    let mut g = a.clone();
    let mut map = Vec::with_capacity(b.nodes.len());
    for n in &b.nodes {
        let id = match &n.kind {
            NodeKind::Atom { text } => g.atom_node(text),
            kind => g.add_node(kind.clone(), None),
        };
        map.push(id);
    }
    for n in &b.nodes {
        if let Some(owner) = n.owner {
            if !matches!(n.kind, NodeKind::Atom { .. }) {
                g.nodes[map[n.id]].owner = Some(map[owner]);
            }
        }
    }
    for e in &b.edges {
        g.add_edge(map[e.source], map[e.target], &e.role);
    }
    g
}
