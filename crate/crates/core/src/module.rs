//! The module data model: labeled nodes, edges, and a left and a right
//! interface whose per-label indices are derived from slot order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CalcError;

/// A label drawn from the alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// The alphabet Σ with its place/transition partition.
///
/// Labels outside both subsets are allowed; nodes carrying them are of
/// kind [`NodeKind::Abstract`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    labels: BTreeSet<Label>,
    places: BTreeSet<Label>,
    transitions: BTreeSet<Label>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(&mut self, l: impl Into<Label>) -> Result<(), CalcError> {
        let l = l.into();
        if self.transitions.contains(&l) {
            return Err(CalcError::AlphabetConflict(l));
        }
        self.labels.insert(l.clone());
        self.places.insert(l);
        Ok(())
    }

    pub fn add_transition(&mut self, l: impl Into<Label>) -> Result<(), CalcError> {
        let l = l.into();
        if self.places.contains(&l) {
            return Err(CalcError::AlphabetConflict(l));
        }
        self.labels.insert(l.clone());
        self.transitions.insert(l);
        Ok(())
    }

    pub fn add_label(&mut self, l: impl Into<Label>) {
        self.labels.insert(l.into());
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.labels.contains(l)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter()
    }

    pub fn kind_of(&self, l: &Label) -> Option<NodeKind> {
        if !self.labels.contains(l) {
            None
        } else if self.places.contains(l) {
            Some(NodeKind::Place)
        } else if self.transitions.contains(l) {
            Some(NodeKind::Transition)
        } else {
            Some(NodeKind::Abstract)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Identity of a node of some snippet instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomicNodeId {
    pub instance: String,
    pub name: String,
}

impl AtomicNodeId {
    pub fn new(instance: impl Into<String>, name: impl Into<String>) -> Self {
        AtomicNodeId {
            instance: instance.into(),
            name: name.into(),
        }
    }
}

impl fmt::Display for AtomicNodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.instance)
    }
}

/// A node identity: the flattened set of atoms that were merged into it.
///
/// Merging two nodes takes the union of their atom sets, so repeated merges
/// never nest and composition order does not leak into identities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(BTreeSet<AtomicNodeId>);

impl NodeId {
    pub fn atom(instance: impl Into<String>, name: impl Into<String>) -> Self {
        NodeId(BTreeSet::from([AtomicNodeId::new(instance, name)]))
    }

    /// Builds an id from a set of atoms. Returns `None` for an empty set.
    pub fn from_atoms(atoms: impl IntoIterator<Item = AtomicNodeId>) -> Option<Self> {
        let set: BTreeSet<_> = atoms.into_iter().collect();
        (!set.is_empty()).then_some(NodeId(set))
    }

    pub fn atoms(&self) -> &BTreeSet<AtomicNodeId> {
        &self.0
    }

    pub fn merge(&self, other: &NodeId) -> NodeId {
        NodeId(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_merged(&self) -> bool {
        self.0.len() > 1
    }

    pub(crate) fn map_atoms(&self, f: impl Fn(&AtomicNodeId) -> AtomicNodeId) -> NodeId {
        NodeId(self.0.iter().map(f).collect())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Place,
    Transition,
    Abstract,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Place => "place",
            NodeKind::Transition => "transition",
            NodeKind::Abstract => "abstract",
        })
    }
}

/// Label and kind of a node; the id is the key in [`Module::nodes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: Label,
    pub kind: NodeKind,
}

impl Node {
    pub fn new(label: impl Into<Label>, kind: NodeKind) -> Self {
        Node {
            label: label.into(),
            kind,
        }
    }
}

/// An ordered slot sequence. The index of a slot for label `l` is its
/// 1-based position among the `l`-labeled slots, so indices are always
/// contiguous.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interface {
    slots: Vec<NodeId>,
}

impl Interface {
    pub fn new(slots: Vec<NodeId>) -> Self {
        Interface { slots }
    }

    pub fn slots(&self) -> &[NodeId] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.slots.contains(id)
    }

    /// Per-label slot lists in index order.
    pub fn by_label<'a, F>(&'a self, label_of: F) -> BTreeMap<Label, Vec<&'a NodeId>>
    where
        F: Fn(&NodeId) -> &'a Label,
    {
        let mut out: BTreeMap<Label, Vec<&NodeId>> = BTreeMap::new();
        for s in &self.slots {
            out.entry(label_of(s).clone()).or_default().push(s);
        }
        out
    }

    /// `(slot, label, index)` for every slot, in slot order.
    pub fn indexed<'a, F>(&'a self, label_of: F) -> Vec<(&'a NodeId, &'a Label, usize)>
    where
        F: Fn(&NodeId) -> &'a Label,
    {
        let mut seen: BTreeMap<&Label, usize> = BTreeMap::new();
        self.slots
            .iter()
            .map(|s| {
                let l = label_of(s);
                let c = seen.entry(l).or_insert(0);
                *c += 1;
                (s, l, *c)
            })
            .collect()
    }
}

/// A graph with a left interface (`*G`) and a right interface (`G*`).
#[derive(Clone, Debug, Default)]
pub struct Module {
    pub(crate) name: Option<String>,
    pub(crate) nodes: BTreeMap<NodeId, Node>,
    pub(crate) edges: BTreeSet<(NodeId, NodeId)>,
    pub(crate) left: Interface,
    pub(crate) right: Interface,
    pub(crate) marking: BTreeMap<NodeId, u32>,
}

impl Module {
    /// Checked constructor. Zero marking entries are dropped.
    pub fn new(
        nodes: BTreeMap<NodeId, Node>,
        edges: BTreeSet<(NodeId, NodeId)>,
        left: Interface,
        right: Interface,
        marking: BTreeMap<NodeId, u32>,
    ) -> Result<Self, CalcError> {
        let m = Module {
            name: None,
            nodes,
            edges,
            left,
            right,
            marking: marking.into_iter().filter(|(_, c)| *c > 0).collect(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn without_name(mut self) -> Self {
        self.name = None;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Node> {
        &self.nodes
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges
    }

    pub fn left(&self) -> &Interface {
        &self.left
    }

    pub fn right(&self) -> &Interface {
        &self.right
    }

    pub fn marking(&self) -> &BTreeMap<NodeId, u32> {
        &self.marking
    }

    pub fn tokens(&self, id: &NodeId) -> u32 {
        self.marking.get(id).copied().unwrap_or(0)
    }

    pub fn total_tokens(&self) -> u64 {
        self.marking.values().map(|&c| c as u64).sum()
    }

    /// Label of a node of this module. Panics on foreign ids.
    pub fn label(&self, id: &NodeId) -> &Label {
        &self.nodes[id].label
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in neither interface.
    pub fn interior(&self) -> BTreeSet<&NodeId> {
        self.nodes
            .keys()
            .filter(|id| !self.left.contains(id) && !self.right.contains(id))
            .collect()
    }

    pub fn atoms(&self) -> BTreeSet<&AtomicNodeId> {
        self.nodes.keys().flat_map(|id| id.atoms()).collect()
    }

    pub fn left_by_label(&self) -> BTreeMap<Label, Vec<&NodeId>> {
        self.left.by_label(|id| self.label(id))
    }

    pub fn right_by_label(&self) -> BTreeMap<Label, Vec<&NodeId>> {
        self.right.by_label(|id| self.label(id))
    }

    /// Replaces the instance tag of every atom by `tag/instance`.
    pub fn retag(&self, tag: &str) -> Module {
        let f = |a: &AtomicNodeId| AtomicNodeId::new(format!("{tag}/{}", a.instance), &a.name);
        let m = |id: &NodeId| id.map_atoms(f);
        Module {
            name: self.name.clone(),
            nodes: self.nodes.iter().map(|(k, v)| (m(k), v.clone())).collect(),
            edges: self.edges.iter().map(|(a, b)| (m(a), m(b))).collect(),
            left: Interface::new(self.left.slots.iter().map(m).collect()),
            right: Interface::new(self.right.slots.iter().map(m).collect()),
            marking: self.marking.iter().map(|(k, v)| (m(k), *v)).collect(),
        }
    }

    /// Checks every structural invariant of a module.
    pub fn validate(&self) -> Result<(), CalcError> {
        let mut seen_atoms = BTreeSet::new();
        let mut kind_of: BTreeMap<&Label, NodeKind> = BTreeMap::new();
        for (id, node) in &self.nodes {
            for a in id.atoms() {
                if !seen_atoms.insert(a) {
                    return Err(CalcError::OverlappingNodeIds(id.to_string()));
                }
            }
            match kind_of.insert(&node.label, node.kind) {
                Some(k) if k != node.kind => {
                    return Err(CalcError::LabelKindConflict(node.label.clone()))
                }
                _ => {}
            }
        }
        for (side, iface) in [("left", &self.left), ("right", &self.right)] {
            let mut seen = BTreeSet::new();
            for s in iface.slots() {
                if !self.nodes.contains_key(s) {
                    return Err(CalcError::UnknownNode(format!("{side} interface: {s}")));
                }
                if !seen.insert(s) {
                    return Err(CalcError::DuplicateSlot(s.to_string()));
                }
            }
        }
        for (a, b) in &self.edges {
            for x in [a, b] {
                if !self.nodes.contains_key(x) {
                    return Err(CalcError::UnknownNode(format!("edge endpoint {x}")));
                }
            }
        }
        for (id, c) in &self.marking {
            match self.nodes.get(id) {
                None => return Err(CalcError::UnknownNode(format!("marked node {id}"))),
                Some(n) if n.kind != NodeKind::Place => {
                    return Err(CalcError::MarkingOnNonPlace(id.to_string()))
                }
                _ if *c == 0 => return Err(CalcError::MarkingOnNonPlace(id.to_string())),
                _ => {}
            }
        }
        check_interfaces_well_formed(self)
    }

    /// Checks that every node label belongs to `alphabet` with a matching kind.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), CalcError> {
        for node in self.nodes.values() {
            if node.kind == NodeKind::Abstract && !alphabet.contains(&node.label) {
                // core nodes of abstract modules carry module names
                continue;
            }
            match alphabet.kind_of(&node.label) {
                Some(k) if k == node.kind => {}
                _ => return Err(CalcError::LabelKindConflict(node.label.clone())),
            }
        }
        Ok(())
    }
}

/// Structural equality: identical node ids, labels, kinds, edges, markings,
/// and identical per-label slot sequences on both sides. The module name and
/// the interleaving of differently labeled slots are not compared.
impl PartialEq for Module {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.edges == other.edges
            && self.marking == other.marking
            && self.left_by_label() == other.left_by_label()
            && self.right_by_label() == other.right_by_label()
    }
}

impl Eq for Module {}

/// Checks that every label's indices in both interfaces are exactly `1..=n`
/// and that slots are distinct module nodes.
pub fn check_interfaces_well_formed(m: &Module) -> Result<(), CalcError> {
    for iface in [&m.left, &m.right] {
        let mut per_label: BTreeMap<&Label, Vec<usize>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (id, l, idx) in iface.indexed(|id| m.label(id)) {
            if !seen.insert(id) {
                return Err(CalcError::DuplicateSlot(id.to_string()));
            }
            per_label.entry(l).or_default().push(idx);
        }
        for (l, mut idx) in per_label {
            idx.sort_unstable();
            if idx.iter().enumerate().any(|(i, &x)| x != i + 1) {
                return Err(CalcError::IndexGap(l.clone()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn place(name: &str) -> (NodeId, Node) {
        (NodeId::atom("t", name), Node::new("p", NodeKind::Place))
    }

    #[test]
    fn indices_follow_slot_order() {
        let nodes: BTreeMap<_, _> = [
            (
                NodeId::atom("0", "a"),
                Node::new("alpha", NodeKind::Abstract),
            ),
            (
                NodeId::atom("0", "b"),
                Node::new("beta", NodeKind::Abstract),
            ),
            (
                NodeId::atom("0", "c"),
                Node::new("alpha", NodeKind::Abstract),
            ),
        ]
        .into_iter()
        .collect();
        let left = Interface::new(vec![
            NodeId::atom("0", "a"),
            NodeId::atom("0", "b"),
            NodeId::atom("0", "c"),
        ]);
        let m = Module::new(
            nodes,
            BTreeSet::new(),
            left,
            Interface::default(),
            BTreeMap::new(),
        )
        .unwrap();
        let idx: Vec<_> = m
            .left()
            .indexed(|id| m.label(id))
            .into_iter()
            .map(|(_, l, i)| (l.to_string(), i))
            .collect();
        assert_eq!(
            idx,
            vec![("alpha".into(), 1), ("beta".into(), 1), ("alpha".into(), 2)]
        );
    }

    #[test]
    fn rejects_duplicate_slot_and_foreign_marking() {
        let (id, n) = place("x");
        let nodes = BTreeMap::from([(id.clone(), n)]);
        let dup = Interface::new(vec![id.clone(), id.clone()]);
        assert!(matches!(
            Module::new(
                nodes.clone(),
                BTreeSet::new(),
                dup,
                Interface::default(),
                BTreeMap::new()
            ),
            Err(CalcError::DuplicateSlot(_))
        ));
        let marking = BTreeMap::from([(NodeId::atom("t", "y"), 1)]);
        assert!(matches!(
            Module::new(
                nodes,
                BTreeSet::new(),
                Interface::default(),
                Interface::default(),
                marking
            ),
            Err(CalcError::UnknownNode(_))
        ));
    }

    #[test]
    fn rejects_marking_on_transition() {
        let id = NodeId::atom("t", "x");
        let nodes = BTreeMap::from([(id.clone(), Node::new("t", NodeKind::Transition))]);
        let marking = BTreeMap::from([(id, 1)]);
        assert!(matches!(
            Module::new(
                nodes,
                BTreeSet::new(),
                Interface::default(),
                Interface::default(),
                marking
            ),
            Err(CalcError::MarkingOnNonPlace(_))
        ));
    }

    #[test]
    fn alphabet_partition_is_exclusive() {
        let mut a = Alphabet::new();
        a.add_place("p").unwrap();
        assert!(a.add_transition("p").is_err());
        a.add_label("x");
        assert_eq!(a.kind_of(&"x".into()), Some(NodeKind::Abstract));
        assert_eq!(a.kind_of(&"p".into()), Some(NodeKind::Place));
        assert_eq!(a.kind_of(&"q".into()), None);
    }

    #[test]
    fn merged_ids_flatten() {
        let a = NodeId::atom("1", "a");
        let b = NodeId::atom("2", "b");
        let c = NodeId::atom("3", "c");
        assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        assert_eq!(a.merge(&b).to_string(), "a@1+b@2");
    }
}
