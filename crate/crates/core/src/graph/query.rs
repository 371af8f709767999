use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use super::{ArgGraph, NodeId, NodeKind};
use crate::schema::GrammarCategory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no atom `{0}` in the graph")]
pub struct UnknownAtom(pub String);

/// Undirected connected components. Ids are numbered in order of each
/// component's lowest node id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentPartition {
    pub assignment: Vec<usize>,
    pub count: usize,
}

impl ComponentPartition {
    pub fn component_of(&self, node: NodeId) -> usize {
        self.assignment[node]
    }

    pub fn members(&self, component: usize) -> impl Iterator<Item = NodeId> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == component)
            .map(|(n, _)| n)
    }
}

impl ArgGraph {
    /// Argument pairs of every expression with the given canonical tag,
    /// as (first-slot target, second-slot target).
    pub fn relation_pairs(&self, category: GrammarCategory, tag: &str) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for n in &self.nodes {
            let matches = matches!(&n.kind, NodeKind::Expr { category: c, tag: t } if *c == category && t == tag);
            if !matches {
                continue;
            }
            let edges: Vec<_> = self.out_edges(n.id).collect();
            let Some(first) = edges.first().map(|e| e.role.as_str()) else {
                continue;
            };
            let lhs: Vec<_> = edges
                .iter()
                .filter(|e| e.role == first)
                .map(|e| e.target)
                .collect();
            let Some(second) = edges
                .iter()
                .find(|e| e.role != first)
                .map(|e| e.role.as_str())
            else {
                continue;
            };
            let rhs: Vec<_> = edges
                .iter()
                .filter(|e| e.role == second)
                .map(|e| e.target)
                .collect();
            for &l in &lhs {
                out.extend(rhs.iter().map(|&r| (l, r)));
            }
        }
        out
    }

    /// Everything reachable from the atom along `used_in` edges, object to
    /// statement. The atom itself is included only through a cycle.
    pub fn used_in_closure(&self, atom: &str) -> Result<BTreeSet<NodeId>, UnknownAtom> {
        let start = self
            .atom(atom)
            .ok_or_else(|| UnknownAtom(atom.to_string()))?;
        let mut next: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (o, s) in self.relation_pairs(GrammarCategory::Struct, "used_in") {
            next.entry(o).or_default().push(s);
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in next.get(&n).into_iter().flatten() {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        Ok(seen)
    }

    /// Atom texts of a node set, sorted.
    pub fn atom_texts(&self, nodes: &BTreeSet<NodeId>) -> Vec<&str> {
        let mut texts: Vec<&str> = nodes
            .iter()
            .filter_map(|&n| match &self.nodes[n].kind {
                NodeKind::Atom { text } => Some(text.as_str()),
                _ => None,
            })
            .collect();
        texts.sort_unstable();
        texts
    }

    pub fn components(&self) -> ComponentPartition {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(e.source, e.target);
        }
        let mut ids = BTreeMap::new();
        let assignment: Vec<usize> = (0..self.nodes.len())
            .map(|n| {
                let next = ids.len();
                *ids.entry(uf.find(n)).or_insert(next)
            })
            .collect();
        ComponentPartition {
            count: ids.len(),
            assignment,
        }
    }

    /// Content atoms by total degree, highest first; ties by text.
    pub fn degree_centrality(&self) -> Vec<(String, usize)> {
        let mut degree = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            degree[e.source] += 1;
            degree[e.target] += 1;
        }
        let mut ranked: Vec<(String, usize)> = self
            .atoms()
            .map(|(t, id)| (t.to_string(), degree[id]))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked
    }
}
