use std::fmt::Write;
use std::str::FromStr;

use super::{ArgGraph, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!(
                "unknown export format `{other}` (expected dot, graphml or json)"
            )),
        }
    }
}

pub fn export(g: &ArgGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => to_dot(g),
        ExportFormat::GraphMl => to_graphml(g),
        ExportFormat::Json => to_json(g),
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dot_node(out: &mut String, indent: &str, id: usize, kind: &NodeKind) {
    let shape = match kind {
        NodeKind::Atom { .. } => "ellipse",
        NodeKind::Expr { .. } => "box",
        NodeKind::Performative { .. } => "hexagon",
        NodeKind::Subgraph { .. } => "folder",
    };
    let style = match kind {
        NodeKind::Performative { unspoken: true, .. } => ", style=dashed",
        _ => "",
    };
    let _ = writeln!(
        out,
        "{indent}n{id} [shape={shape}{style}, label=\"{}\"];",
        dot_escape(&kind.label())
    );
}

/// Graphviz digraph; each subgraph node gets a cluster of the nodes it owns.
pub fn to_dot(g: &ArgGraph) -> String {
    let mut out = String::from("digraph iatc {\n");
    for n in g.nodes().iter().filter(|n| n.owner.is_none()) {
        dot_node(&mut out, "  ", n.id, &n.kind);
    }
    for sub in g.nodes() {
        let NodeKind::Subgraph { name } = &sub.kind else {
            continue;
        };
        let _ = writeln!(out, "  subgraph cluster_{} {{", sub.id);
        let _ = writeln!(out, "    label=\"#{}\";", dot_escape(name));
        for n in g.owned_by(sub.id) {
            dot_node(&mut out, "    ", n.id, &n.kind);
        }
        out.push_str("  }\n");
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}\"];",
            e.source,
            e.target,
            dot_escape(&e.role)
        );
    }
    out.push_str("}\n");
    out
}

const GRAPHML_KEYS: &[(&str, &str, &str)] = &[
    ("kind", "node", "string"),
    ("label", "node", "string"),
    ("category", "node", "string"),
    ("tag", "node", "string"),
    ("locution", "node", "string"),
    ("unspoken", "node", "boolean"),
    ("owner", "node", "int"),
    ("role", "edge", "string"),
];

pub fn to_graphml(g: &ArgGraph) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
    );
    for (name, domain, ty) in GRAPHML_KEYS {
        let _ = writeln!(
            out,
            "  <key id=\"{name}\" for=\"{domain}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
        );
    }
    out.push_str("  <graph id=\"iatc\" edgedefault=\"directed\">\n");
    for n in g.nodes() {
        let mut data = vec![
            ("kind", n.kind.kind_name().to_string()),
            ("label", n.kind.label()),
        ];
        match &n.kind {
            NodeKind::Expr { category, tag } => {
                data.push(("category", category.to_string()));
                data.push(("tag", tag.clone()));
            }
            NodeKind::Performative {
                tag,
                locution,
                unspoken,
            } => {
                data.push(("category", "perf".to_string()));
                data.push(("tag", tag.clone()));
                if let Some(loc) = locution {
                    data.push(("locution", loc.clone()));
                }
                data.push(("unspoken", unspoken.to_string()));
            }
            NodeKind::Atom { .. } | NodeKind::Subgraph { .. } => {}
        }
        if let Some(owner) = n.owner {
            data.push(("owner", owner.to_string()));
        }
        let _ = writeln!(out, "    <node id=\"n{}\">", n.id);
        for (key, value) in data {
            let _ = writeln!(
                out,
                "      <data key=\"{key}\">{}</data>",
                xml_escape(&value)
            );
        }
        out.push_str("    </node>\n");
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\">\n      <data key=\"role\">{}</data>\n    </edge>",
            e.source,
            e.target,
            xml_escape(&e.role)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// `{"nodes": [...], "edges": [...]}` with fields in declaration order.
pub fn to_json(g: &ArgGraph) -> String {
    let mut s = serde_json::to_string_pretty(g).expect("graph serializes");
    s.push('\n');
    s
}
