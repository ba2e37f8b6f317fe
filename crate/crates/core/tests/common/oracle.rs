//! Composition and closure recomputed from the index formulas.

use std::collections::{BTreeMap, BTreeSet};

use netmod::{Interface, Label, Module, NodeId};

pub type Slots = BTreeSet<(NodeId, Label, usize)>;

fn labeled(m: &Module, i: &Interface) -> Vec<(NodeId, Label, usize)> {
    i.indexed(|id| m.label(id))
        .into_iter()
        .map(|(id, l, k)| (id.clone(), l.clone(), k))
        .collect()
}

fn max_index(slots: &[(NodeId, Label, usize)], l: &Label) -> usize {
    slots
        .iter()
        .filter(|(_, x, _)| x == l)
        .map(|(_, _, k)| *k)
        .max()
        .unwrap_or(0)
}

/// Union-find over node ids.
struct Merge(BTreeMap<NodeId, NodeId>);

impl Merge {
    fn find(&self, x: &NodeId) -> NodeId {
        let mut x = x.clone();
        while let Some(p) = self.0.get(&x) {
            if *p == x {
                break;
            }
            x = p.clone();
        }
        x
    }

    fn union(&mut self, a: &NodeId, b: &NodeId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0.insert(ra, rb);
        }
    }

    /// The merged id of `x`: union of the atoms of its class.
    fn image(&self, x: &NodeId, all: &BTreeSet<NodeId>) -> NodeId {
        let r = self.find(x);
        all.iter()
            .filter(|y| self.find(y) == r)
            .fold(x.clone(), |acc, y| acc.merge(y))
    }
}

pub struct Expected {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
    pub left: Slots,
    pub right: Slots,
    pub marking: BTreeMap<NodeId, u32>,
}

pub fn actual(m: &Module) -> Expected {
    Expected {
        nodes: m.nodes().keys().cloned().collect(),
        edges: m.edges().clone(),
        left: labeled(m, m.left()).into_iter().collect(),
        right: labeled(m, m.right()).into_iter().collect(),
        marking: m.marking().clone(),
    }
}

pub fn oracle_compose(a: &Module, b: &Module) -> Expected {
    let (la, ra) = (labeled(a, a.left()), labeled(a, a.right()));
    let (lb, rb) = (labeled(b, b.left()), labeled(b, b.right()));
    // Harmonic pairs: equal label and equal index.
    let mut pairs = Vec::new();
    for (x, l, k) in &ra {
        if let Some((y, _, _)) = lb.iter().find(|(_, l2, k2)| l2 == l && k2 == k) {
            pairs.push((x.clone(), y.clone(), l.clone()));
        }
    }
    let m = |l: &Label| pairs.iter().filter(|(_, _, x)| x == l).count();
    let all: BTreeSet<NodeId> = a.nodes().keys().chain(b.nodes().keys()).cloned().collect();
    let mut uf = Merge(BTreeMap::new());
    for (x, y, _) in &pairs {
        uf.union(x, y);
    }
    let img = |x: &NodeId| uf.image(x, &all);
    let paired_a: BTreeSet<&NodeId> = pairs.iter().map(|(x, _, _)| x).collect();
    let paired_b: BTreeSet<&NodeId> = pairs.iter().map(|(_, y, _)| y).collect();

    let mut left = Slots::new();
    for (x, l, n) in &la {
        left.insert((img(x), l.clone(), *n));
    }
    for (x, l, n) in &lb {
        if !paired_b.contains(x) {
            left.insert((x.clone(), l.clone(), max_index(&la, l) + n - m(l)));
        }
    }
    let mut right = Slots::new();
    for (x, l, n) in &rb {
        right.insert((img(x), l.clone(), *n));
    }
    for (x, l, n) in &ra {
        if !paired_a.contains(x) {
            right.insert((x.clone(), l.clone(), max_index(&rb, l) + n - m(l)));
        }
    }
    let mut marking = BTreeMap::new();
    for (id, c) in a.marking().iter().chain(b.marking()) {
        *marking.entry(img(id)).or_insert(0) += *c;
    }
    Expected {
        nodes: all.iter().map(img).collect(),
        edges: a
            .edges()
            .iter()
            .chain(b.edges())
            .map(|(x, z)| (img(x), img(z)))
            .collect(),
        left,
        right,
        marking,
    }
}

pub fn oracle_closure(a: &Module) -> Expected {
    let (la, ra) = (labeled(a, a.left()), labeled(a, a.right()));
    let mut pairs = Vec::new();
    for (x, l, k) in &ra {
        if let Some((y, _, _)) = la.iter().find(|(_, l2, k2)| l2 == l && k2 == k) {
            pairs.push((x.clone(), y.clone(), l.clone()));
        }
    }
    let m = |l: &Label| pairs.iter().filter(|(_, _, x)| x == l).count();
    let all: BTreeSet<NodeId> = a.nodes().keys().cloned().collect();
    let mut uf = Merge(BTreeMap::new());
    for (x, y, _) in &pairs {
        uf.union(x, y);
    }
    let img = |x: &NodeId| uf.image(x, &all);
    let in_right_pair: BTreeSet<&NodeId> = pairs.iter().map(|(x, _, _)| x).collect();
    let in_left_pair: BTreeSet<&NodeId> = pairs.iter().map(|(_, y, _)| y).collect();
    let left = la
        .iter()
        .filter(|(x, _, _)| !in_left_pair.contains(x))
        .map(|(x, l, n)| (img(x), l.clone(), n - m(l)))
        .collect();
    let right = ra
        .iter()
        .filter(|(x, _, _)| !in_right_pair.contains(x))
        .map(|(x, l, n)| (img(x), l.clone(), n - m(l)))
        .collect();
    let mut marking = BTreeMap::new();
    for (id, c) in a.marking() {
        *marking.entry(img(id)).or_insert(0) += *c;
    }
    Expected {
        nodes: all.iter().map(img).collect(),
        edges: a.edges().iter().map(|(x, z)| (img(x), img(z))).collect(),
        left,
        right,
        marking,
    }
}
