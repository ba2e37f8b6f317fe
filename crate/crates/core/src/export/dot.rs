use std::collections::BTreeMap;
use std::fmt::Write;

use crate::module::{Module, NodeId, NodeKind};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Place => "shape=circle",
        NodeKind::Transition => "shape=square",
        NodeKind::Abstract => "shape=box, style=rounded",
    }
}

/// Graphviz rendering. Interior nodes sit in a boxed cluster, interface nodes
/// on the left and right margins. A node in both interfaces is drawn once on
/// each margin, and the two drawings are joined by a double line.
pub fn to_dot(m: &Module) -> String {
    let ids: BTreeMap<&NodeId, usize> = m
        .nodes()
        .keys()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    let on_left = |id: &NodeId| m.left().contains(id);
    let on_right = |id: &NodeId| m.right().contains(id);

    let mut out = String::new();
    let title = m.name().unwrap_or("module");
    let _ = writeln!(out, "digraph {} {{", quote(title));
    out.push_str("  rankdir=LR;\n  node [fontsize=10];\n");

    let decl = |out: &mut String, key: &str, id: &NodeId, indent: &str| {
        let n = &m.nodes()[id];
        let tokens = m.tokens(id);
        let mut attrs = format!("{}, label={}", shape(n.kind), quote(n.label.as_str()));
        if tokens > 0 {
            let mark = if tokens <= 3 {
                "\u{25CF}".repeat(tokens as usize)
            } else {
                tokens.to_string()
            };
            let _ = write!(attrs, ", xlabel={}", quote(&mark));
        }
        let _ = write!(attrs, ", tooltip={}", quote(&id.to_string()));
        let _ = writeln!(out, "{indent}{key} [{attrs}];");
    };

    let mut inner = String::new();
    for id in m.interior() {
        decl(&mut inner, &format!("n{}", ids[id]), id, "    ");
    }
    let _ = writeln!(
        out,
        "  subgraph cluster_inner {{\n    label={};\n    style=solid;\n{}  }}",
        quote(m.name().unwrap_or("")),
        inner
    );

    // Node key used by edges: the left drawing when there is one.
    let key = |id: &NodeId| {
        if on_left(id) {
            format!("l{}", ids[id])
        } else if on_right(id) {
            format!("r{}", ids[id])
        } else {
            format!("n{}", ids[id])
        }
    };

    if !m.left().is_empty() {
        out.push_str("  subgraph left {\n    rank=source;\n");
        for id in m.left().slots() {
            decl(&mut out, &format!("l{}", ids[id]), id, "    ");
        }
        out.push_str("  }\n");
    }
    if !m.right().is_empty() {
        out.push_str("  subgraph right {\n    rank=sink;\n");
        for id in m.right().slots() {
            decl(&mut out, &format!("r{}", ids[id]), id, "    ");
        }
        out.push_str("  }\n");
    }
    for id in m.left().slots() {
        if on_right(id) {
            let _ = writeln!(
                out,
                "  l{0} -> r{0} [dir=none, color=\"black:invis:black\", constraint=false];",
                ids[id]
            );
        }
    }
    for (a, b) in m.edges() {
        let _ = writeln!(out, "  {} -> {};", key(a), key(b));
    }
    out.push_str("}\n");
    out
}
