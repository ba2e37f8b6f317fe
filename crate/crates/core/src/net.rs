//! Petri-net reading of modules, transition atoms and factorization.

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{compose, empty_module};
use crate::error::NetError;
use crate::iso::{isomorphic, IsoOptions};
use crate::module::{Interface, Label, Module, Node, NodeId, NodeKind};

/// A place/transition net `(P, T; F)` with an optional marking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetView {
    places: BTreeSet<NodeId>,
    transitions: BTreeSet<NodeId>,
    flow: BTreeSet<(NodeId, NodeId)>,
    marking: BTreeMap<NodeId, u32>,
    labels: BTreeMap<NodeId, Label>,
}

impl NetView {
    /// Builds a net, labeling every element by its identity.
    pub fn new(
        places: BTreeSet<NodeId>,
        transitions: BTreeSet<NodeId>,
        flow: BTreeSet<(NodeId, NodeId)>,
        marking: BTreeMap<NodeId, u32>,
    ) -> Result<Self, NetError> {
        let labels = places
            .iter()
            .chain(&transitions)
            .map(|id| (id.clone(), Label::new(id.to_string())))
            .collect();
        Self::with_labels(places, transitions, flow, marking, labels)
    }

    pub fn with_labels(
        places: BTreeSet<NodeId>,
        transitions: BTreeSet<NodeId>,
        flow: BTreeSet<(NodeId, NodeId)>,
        marking: BTreeMap<NodeId, u32>,
        labels: BTreeMap<NodeId, Label>,
    ) -> Result<Self, NetError> {
        if let Some(x) = places.intersection(&transitions).next() {
            return Err(NetError::Malformed(format!(
                "{x} is both place and transition"
            )));
        }
        let bad: Vec<String> = flow
            .iter()
            .filter(|(x, y)| {
                !((places.contains(x) && transitions.contains(y))
                    || (transitions.contains(x) && places.contains(y)))
            })
            .map(|(x, y)| format!("{x} -> {y}"))
            .collect();
        if !bad.is_empty() {
            return Err(NetError::NotBipartite(bad));
        }
        if let Some(p) = marking.keys().find(|p| !places.contains(*p)) {
            return Err(NetError::Malformed(format!("marking on non-place {p}")));
        }
        let marking = marking.into_iter().filter(|(_, c)| *c > 0).collect();
        Ok(NetView {
            places,
            transitions,
            flow,
            marking,
            labels,
        })
    }

    pub fn places(&self) -> &BTreeSet<NodeId> {
        &self.places
    }

    pub fn transitions(&self) -> &BTreeSet<NodeId> {
        &self.transitions
    }

    pub fn flow(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.flow
    }

    pub fn marking(&self) -> &BTreeMap<NodeId, u32> {
        &self.marking
    }

    /// Label of a place or transition; identity string when none was given.
    pub fn label(&self, id: &NodeId) -> Label {
        self.labels
            .get(id)
            .cloned()
            .unwrap_or_else(|| Label::new(id.to_string()))
    }

    pub fn with_marking(mut self, marking: BTreeMap<NodeId, u32>) -> Result<Self, NetError> {
        if let Some(p) = marking.keys().find(|p| !self.places.contains(*p)) {
            return Err(NetError::Malformed(format!("marking on non-place {p}")));
        }
        self.marking = marking.into_iter().filter(|(_, c)| *c > 0).collect();
        Ok(self)
    }

    pub fn preset(&self, x: &NodeId) -> BTreeSet<&NodeId> {
        self.flow
            .iter()
            .filter(|(_, y)| y == x)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn postset(&self, x: &NodeId) -> BTreeSet<&NodeId> {
        self.flow
            .iter()
            .filter(|(y, _)| y == x)
            .map(|(_, p)| p)
            .collect()
    }

    /// Places and transitions without any arc.
    pub fn isolated(&self) -> Vec<&NodeId> {
        let touched: BTreeSet<&NodeId> = self.flow.iter().flat_map(|(a, b)| [a, b]).collect();
        self.places
            .iter()
            .chain(&self.transitions)
            .filter(|x| !touched.contains(x))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty() && self.transitions.is_empty()
    }
}

/// Reads a module as a net: every node must be a place or a transition and
/// every edge must join opposite kinds.
pub fn validate_net(a: &Module) -> Result<NetView, NetError> {
    let abstract_nodes: Vec<String> = a
        .nodes()
        .iter()
        .filter(|(_, n)| n.kind == NodeKind::Abstract)
        .map(|(id, _)| id.to_string())
        .collect();
    if !abstract_nodes.is_empty() {
        return Err(NetError::AbstractNodePresent(abstract_nodes));
    }
    let kind = |id: &NodeId| a.nodes()[id].kind;
    let bad: Vec<String> = a
        .edges()
        .iter()
        .filter(|(x, y)| kind(x) == kind(y))
        .map(|(x, y)| format!("{x} -> {y}"))
        .collect();
    if !bad.is_empty() {
        return Err(NetError::NotBipartite(bad));
    }
    let mut places = BTreeSet::new();
    let mut transitions = BTreeSet::new();
    let mut labels = BTreeMap::new();
    for (id, n) in a.nodes() {
        if n.kind == NodeKind::Place {
            places.insert(id.clone());
        } else {
            transitions.insert(id.clone());
        }
        labels.insert(id.clone(), n.label.clone());
    }
    NetView::with_labels(
        places,
        transitions,
        a.edges().clone(),
        a.marking().clone(),
        labels,
    )
}

/// `[N]`: all places and transitions, labeled by identity, with both
/// interfaces equal to `P` sorted by identity.
pub fn net_to_module(n: &NetView) -> Module {
    let mut nodes = BTreeMap::new();
    for p in &n.places {
        nodes.insert(p.clone(), Node::new(p.to_string(), NodeKind::Place));
    }
    for t in &n.transitions {
        nodes.insert(t.clone(), Node::new(t.to_string(), NodeKind::Transition));
    }
    let iface = Interface::new(sorted_by_identity(n.places.iter()));
    Module::new(
        nodes,
        n.flow.clone(),
        iface.clone(),
        iface,
        n.marking.clone(),
    )
    .expect("a well-formed net yields a well-formed module")
}

fn sorted_by_identity<'a>(ids: impl Iterator<Item = &'a NodeId>) -> Vec<NodeId> {
    let mut v: Vec<(String, NodeId)> = ids.map(|id| (id.to_string(), id.clone())).collect();
    v.sort();
    v.into_iter().map(|(_, id)| id).collect()
}

/// The transition atom `[t]`: `t` plus its pre- and postset, with
/// `•t ∪ t•` as both interfaces. Node ids are those of the net.
pub fn transition_atom(n: &NetView, t: &NodeId) -> Result<Module, NetError> {
    if !n.transitions.contains(t) {
        return Err(NetError::UnknownTransition(t.to_string()));
    }
    let pre = n.preset(t);
    let post = n.postset(t);
    if pre.is_empty() && post.is_empty() {
        return Err(NetError::IsolatedElement(t.to_string()));
    }
    let mut nodes = BTreeMap::new();
    nodes.insert(t.clone(), Node::new(t.to_string(), NodeKind::Transition));
    let mut edges = BTreeSet::new();
    for p in &pre {
        nodes.insert((*p).clone(), Node::new(p.to_string(), NodeKind::Place));
        edges.insert(((*p).clone(), t.clone()));
    }
    for p in &post {
        nodes.insert((*p).clone(), Node::new(p.to_string(), NodeKind::Place));
        edges.insert((t.clone(), (*p).clone()));
    }
    let iface = Interface::new(sorted_by_identity(pre.union(&post).copied()));
    Ok(Module::new(
        nodes,
        edges,
        iface.clone(),
        iface,
        BTreeMap::new(),
    )?)
}

/// Result of [`factorize`].
#[derive(Clone, Debug)]
pub struct Factorization {
    /// `[t_1], …, [t_n]` in identity order, each with a fresh instance tag.
    pub atoms: Vec<Module>,
    /// `E • [t_1] • … • [t_n]`.
    pub recomposed: Module,
    /// Whether `recomposed ≅ [N]` (structure only, no marking).
    pub matches: bool,
}

/// Splits a net into transition atoms and recomposes them.
pub fn factorize(n: &NetView) -> Result<Factorization, NetError> {
    if let Some(x) = n.isolated().first() {
        return Err(NetError::IsolatedElement(x.to_string()));
    }
    let order = sorted_by_identity(n.transitions.iter());
    let atoms = order
        .iter()
        .enumerate()
        .map(|(i, t)| Ok(transition_atom(n, t)?.retag(&format!("atom{}", i + 1))))
        .collect::<Result<Vec<_>, NetError>>()?;
    let recomposed = atoms
        .iter()
        .try_fold(empty_module(), |acc, atom| compose(&acc, atom))?;
    let structure = net_to_module(&n.clone().with_marking(BTreeMap::new())?);
    let matches = matches!(
        isomorphic(&recomposed, &structure, &IsoOptions::default()),
        Ok(Some(_))
    );
    Ok(Factorization {
        atoms,
        recomposed,
        matches,
    })
}
