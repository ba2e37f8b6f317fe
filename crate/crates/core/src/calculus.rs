//! Composition, closure and abstraction of modules.

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use crate::error::CalcError;
use crate::module::{AtomicNodeId, Interface, Label, Module, Node, NodeId, NodeKind};

/// One element of each interface, sharing label and per-label index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HarmonicPair {
    pub left_elem: NodeId,
    pub right_elem: NodeId,
    pub label: Label,
    pub index: usize,
}

/// Index-wise pairing of the `l`-slots of `r` with the `l`-slots of `s`.
fn pair_slots<'a, F>(r: &'a Interface, s: &'a Interface, label_of: F) -> Vec<HarmonicPair>
where
    F: Fn(&NodeId) -> &'a Label + Copy,
{
    let rs = r.by_label(label_of);
    let ss = s.by_label(label_of);
    let mut out = Vec::new();
    for (label, r_slots) in &rs {
        let Some(s_slots) = ss.get(label) else {
            continue;
        };
        for (i, (x, y)) in r_slots.iter().zip(s_slots).enumerate() {
            out.push(HarmonicPair {
                left_elem: (*x).clone(),
                right_elem: (*y).clone(),
                label: label.clone(),
                index: i + 1,
            });
        }
    }
    out
}

/// Harmonic pairs of two disjoint interfaces.
///
/// For each label the pairs are the elements with indices `1..=min(|R_l|, |S_l|)`.
pub fn harmonic_pairs<'a, F>(
    r: &'a Interface,
    s: &'a Interface,
    label_of: F,
) -> Result<Vec<HarmonicPair>, CalcError>
where
    F: Fn(&NodeId) -> &'a Label + Copy,
{
    let rset: BTreeSet<_> = r.slots().iter().collect();
    if let Some(x) = s.slots().iter().find(|x| rset.contains(x)) {
        return Err(CalcError::NonDisjointInterfaces(x.to_string()));
    }
    Ok(pair_slots(r, s, label_of))
}

fn sum_marking(
    into: &mut BTreeMap<NodeId, u32>,
    from: &BTreeMap<NodeId, u32>,
    map: &BTreeMap<NodeId, NodeId>,
) {
    for (id, c) in from {
        let target = map.get(id).unwrap_or(id);
        *into.entry(target.clone()).or_insert(0) += c;
    }
}

fn mapped<'a>(map: &'a BTreeMap<NodeId, NodeId>, id: &'a NodeId) -> &'a NodeId {
    map.get(id).unwrap_or(id)
}

/// `A • B`: merges the harmonic pairs of `A*` and `*B` into inner nodes.
///
/// The left interface is `*A` followed by the unmatched elements of `*B`;
/// the right interface is `B*` followed by the unmatched elements of `A*`.
/// Appending preserves source order, which yields the `p + n - m` indices.
pub fn compose(a: &Module, b: &Module) -> Result<Module, CalcError> {
    let atoms_a = a.atoms();
    if let Some(x) = b.atoms().into_iter().find(|x| atoms_a.contains(x)) {
        return Err(CalcError::NonDisjointOperands(x.to_string()));
    }
    let label_of = |id: &NodeId| -> &Label {
        match a.nodes.get(id) {
            Some(n) => &n.label,
            None => &b.nodes[id].label,
        }
    };
    let pairs = harmonic_pairs(&a.right, &b.left, label_of)?;

    let mut map = BTreeMap::new();
    let mut matched_a = BTreeSet::new();
    let mut matched_b = BTreeSet::new();
    for p in &pairs {
        let (x, y) = (&a.nodes[&p.left_elem], &b.nodes[&p.right_elem]);
        if x.kind != y.kind {
            return Err(CalcError::KindMismatch(
                p.left_elem.to_string(),
                p.right_elem.to_string(),
            ));
        }
        let merged = p.left_elem.merge(&p.right_elem);
        map.insert(p.left_elem.clone(), merged.clone());
        map.insert(p.right_elem.clone(), merged);
        matched_a.insert(&p.left_elem);
        matched_b.insert(&p.right_elem);
    }

    let mut nodes = BTreeMap::new();
    for (id, n) in a.nodes.iter().chain(&b.nodes) {
        nodes.insert(mapped(&map, id).clone(), n.clone());
    }
    let edges = a
        .edges
        .iter()
        .chain(&b.edges)
        .map(|(x, z)| (mapped(&map, x).clone(), mapped(&map, z).clone()))
        .collect();

    let mut left: Vec<NodeId> = a
        .left
        .slots()
        .iter()
        .map(|x| mapped(&map, x).clone())
        .collect();
    left.extend(
        b.left
            .slots()
            .iter()
            .filter(|x| !matched_b.contains(x))
            .cloned(),
    );
    let mut right: Vec<NodeId> = b
        .right
        .slots()
        .iter()
        .map(|x| mapped(&map, x).clone())
        .collect();
    right.extend(
        a.right
            .slots()
            .iter()
            .filter(|x| !matched_a.contains(x))
            .cloned(),
    );

    let mut marking = BTreeMap::new();
    sum_marking(&mut marking, &a.marking, &map);
    sum_marking(&mut marking, &b.marking, &map);

    Ok(Module {
        name: None,
        nodes,
        edges,
        left: Interface::new(left),
        right: Interface::new(right),
        marking,
    })
}

struct UnionFind {
    parent: BTreeMap<NodeId, NodeId>,
}

impl UnionFind {
    fn find(&mut self, x: &NodeId) -> NodeId {
        let p = match self.parent.get(x) {
            None => return x.clone(),
            Some(p) if p == x => return x.clone(),
            Some(p) => p.clone(),
        };
        let root = self.find(&p);
        self.parent.insert(x.clone(), root.clone());
        root
    }

    fn union(&mut self, x: &NodeId, y: &NodeId) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent.insert(rx, ry);
        }
    }
}

/// `A^c`: merges the harmonic pairs of `A*` and `*A`.
///
/// Every paired slot leaves its interface. A node paired with itself (it
/// sits at the same label and index on both sides) becomes inner without
/// changing identity. Pairs that chain through nodes present on both sides
/// merge transitively.
pub fn closure(a: &Module) -> Module {
    let pairs = pair_slots(&a.right, &a.left, |id| a.label(id));
    if pairs.is_empty() {
        return a.clone().without_name();
    }
    let mut uf = UnionFind {
        parent: BTreeMap::new(),
    };
    let mut paired_right = BTreeSet::new();
    let mut paired_left = BTreeSet::new();
    for p in &pairs {
        uf.union(&p.left_elem, &p.right_elem);
        paired_right.insert(p.left_elem.clone());
        paired_left.insert(p.right_elem.clone());
    }

    let mut classes: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let ids: Vec<NodeId> = a.nodes.keys().cloned().collect();
    for id in &ids {
        let root = uf.find(id);
        classes
            .entry(root.clone())
            .and_modify(|acc| *acc = acc.merge(id))
            .or_insert_with(|| id.clone());
    }
    let map: BTreeMap<NodeId, NodeId> = ids
        .iter()
        .map(|id| (id.clone(), classes[&uf.find(id)].clone()))
        .collect();

    let nodes = a
        .nodes
        .iter()
        .map(|(id, n)| (map[id].clone(), n.clone()))
        .collect();
    let edges = a
        .edges
        .iter()
        .map(|(x, z)| (map[x].clone(), map[z].clone()))
        .collect();
    let left = a
        .left
        .slots()
        .iter()
        .filter(|x| !paired_left.contains(*x))
        .map(|x| map[x].clone())
        .collect();
    let right = a
        .right
        .slots()
        .iter()
        .filter(|x| !paired_right.contains(*x))
        .map(|x| map[x].clone())
        .collect();
    let mut marking = BTreeMap::new();
    sum_marking(&mut marking, &a.marking, &map);

    Module {
        name: None,
        nodes,
        edges,
        left: Interface::new(left),
        right: Interface::new(right),
        marking,
    }
}

/// Atom of the inner node of `abstract_of(a)`. The instance is a digest of
/// all atoms of `a`, so abstracting disjoint modules yields disjoint cores
/// and re-abstracting yields a new core.
fn core_atom(a: &Module, name: &str) -> AtomicNodeId {
    let mut h = Sha256::new();
    h.update(name.as_bytes());
    for atom in a.atoms() {
        h.update([0u8]);
        h.update(atom.instance.as_bytes());
        h.update([1u8]);
        h.update(atom.name.as_bytes());
    }
    let digest = h.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    AtomicNodeId::new(format!("core-{hex}"), name)
}

/// The abstract version of a named module: its interfaces, plus one inner
/// node labeled with the module name, linked from every left-interface node
/// and to every right-interface node. Interface markings are kept.
pub fn abstract_of(a: &Module) -> Result<Module, CalcError> {
    let name = a.name().ok_or(CalcError::UnnamedModule)?;
    let core = NodeId::from_atoms([core_atom(a, name)]).expect("one atom");

    let mut nodes = BTreeMap::new();
    for id in a.left.slots().iter().chain(a.right.slots()) {
        nodes.insert(id.clone(), a.nodes[id].clone());
    }
    nodes.insert(core.clone(), Node::new(name, NodeKind::Abstract));

    let mut edges = BTreeSet::new();
    for x in a.left.slots() {
        edges.insert((x.clone(), core.clone()));
    }
    for y in a.right.slots() {
        edges.insert((core.clone(), y.clone()));
    }
    let marking = a
        .marking
        .iter()
        .filter(|(id, _)| nodes.contains_key(*id))
        .map(|(id, c)| (id.clone(), *c))
        .collect();

    Ok(Module {
        name: Some(name.to_owned()),
        nodes,
        edges,
        left: a.left.clone(),
        right: a.right.clone(),
        marking,
    })
}

/// The empty module `E`, the identity of composition.
pub fn empty_module() -> Module {
    Module::default()
}

/// True iff both interfaces hold the same node set.
pub fn is_monolithic(a: &Module) -> bool {
    let l: BTreeSet<_> = a.left.slots().iter().collect();
    let r: BTreeSet<_> = a.right.slots().iter().collect();
    l == r
}

/// True iff the module has exactly one inner node.
pub fn is_atomic(a: &Module) -> bool {
    a.interior().len() == 1
}

/// `abstr(A_1) • … • abstr(A_n)`.
pub fn seam<'a>(parts: impl IntoIterator<Item = &'a Module>) -> Result<Module, CalcError> {
    parts.into_iter().try_fold(empty_module(), |acc, part| {
        compose(&acc, &abstract_of(part)?)
    })
}
