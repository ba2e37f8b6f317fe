use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ExportError;
use crate::module::{AtomicNodeId, Interface, Module, Node, NodeId, NodeKind};

/// Serialized form of a module. Nodes are listed in id order and referenced
/// elsewhere by position; interface slots are listed by label, then index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalDump {
    pub nodes: Vec<DumpNode>,
    pub edges: Vec<[usize; 2]>,
    pub left: Vec<DumpSlot>,
    pub right: Vec<DumpSlot>,
    pub marking: Vec<DumpTokens>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpNode {
    /// `[instance, name]` pairs, sorted.
    pub atoms: Vec<[String; 2]>,
    pub label: String,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpSlot {
    pub node: usize,
    pub label: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpTokens {
    pub node: usize,
    pub tokens: u32,
}

impl CanonicalDump {
    pub fn of(m: &Module) -> Self {
        let pos: BTreeMap<&NodeId, usize> = m
            .nodes()
            .keys()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        let nodes = m
            .nodes()
            .iter()
            .map(|(id, n)| DumpNode {
                atoms: id
                    .atoms()
                    .iter()
                    .map(|a| [a.instance.clone(), a.name.clone()])
                    .collect(),
                label: n.label.to_string(),
                kind: n.kind,
            })
            .collect();
        let edges = m.edges().iter().map(|(a, b)| [pos[a], pos[b]]).collect();
        let slots = |iface: &Interface| {
            let mut v: Vec<DumpSlot> = iface
                .indexed(|id| m.label(id))
                .into_iter()
                .map(|(id, l, index)| DumpSlot {
                    node: pos[id],
                    label: l.to_string(),
                    index,
                })
                .collect();
            v.sort_by(|a, b| (&a.label, a.index).cmp(&(&b.label, b.index)));
            v
        };
        let marking = m
            .marking()
            .iter()
            .map(|(id, &tokens)| DumpTokens {
                node: pos[id],
                tokens,
            })
            .collect();
        CanonicalDump {
            nodes,
            edges,
            left: slots(m.left()),
            right: slots(m.right()),
            marking,
        }
    }

    pub fn to_module(&self) -> Result<Module, ExportError> {
        let bad = |msg: String| ExportError::ParseError(msg);
        let mut ids = Vec::with_capacity(self.nodes.len());
        let mut nodes = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let id = NodeId::from_atoms(
                n.atoms
                    .iter()
                    .map(|[inst, name]| AtomicNodeId::new(inst.clone(), name.clone())),
            )
            .ok_or_else(|| bad(format!("node {i} has no atoms")))?;
            if id.atoms().len() != n.atoms.len() {
                return Err(bad(format!("node {i} repeats an atom")));
            }
            if nodes
                .insert(id.clone(), Node::new(n.label.as_str(), n.kind))
                .is_some()
            {
                return Err(bad(format!("node {i} is listed twice")));
            }
            ids.push(id);
        }
        let node = |i: usize| {
            ids.get(i)
                .cloned()
                .ok_or_else(|| bad(format!("node index {i} out of range")))
        };
        let mut edges = BTreeSet::new();
        for [a, b] in &self.edges {
            edges.insert((node(*a)?, node(*b)?));
        }
        let iface = |slots: &[DumpSlot], side: &str| -> Result<Interface, ExportError> {
            let mut per_label: BTreeMap<&str, Vec<(usize, NodeId)>> = BTreeMap::new();
            for s in slots {
                let id = node(s.node)?;
                if nodes[&id].label.as_str() != s.label {
                    return Err(bad(format!(
                        "{side} slot for node {} says label `{}`",
                        s.node, s.label
                    )));
                }
                per_label.entry(&s.label).or_default().push((s.index, id));
            }
            let mut out = Vec::new();
            for (l, mut v) in per_label {
                v.sort_by_key(|(i, _)| *i);
                if v.iter().enumerate().any(|(k, (i, _))| *i != k + 1) {
                    return Err(bad(format!("{side} indices of `{l}` are not 1..n")));
                }
                out.extend(v.into_iter().map(|(_, id)| id));
            }
            Ok(Interface::new(out))
        };
        let left = iface(&self.left, "left")?;
        let right = iface(&self.right, "right")?;
        let mut marking = BTreeMap::new();
        for t in &self.marking {
            if marking.insert(node(t.node)?, t.tokens).is_some() {
                return Err(bad(format!("node {} is marked twice", t.node)));
            }
        }
        Module::new(nodes, edges, left, right, marking).map_err(|e| bad(e.to_string()))
    }
}

/// Canonical JSON text of `m`. Structurally equal modules give identical bytes.
pub fn dump(m: &Module) -> String {
    let mut s = serde_json::to_string_pretty(&CanonicalDump::of(m)).expect("dump serializes");
    s.push('\n');
    s
}

/// Inverse of [`dump`]. The result carries no name.
pub fn load(text: &str) -> Result<Module, ExportError> {
    let d: CanonicalDump =
        serde_json::from_str(text).map_err(|e| ExportError::ParseError(e.to_string()))?;
    d.to_module()
}
