//! Structural equality and label-preserving isomorphism of modules.
//!
//! An isomorphism is a bijection between node sets that preserves labels,
//! kinds, markings, edges in both directions, and every node's per-label
//! index in each interface. With `rename_abstract_cores` the labels of
//! abstract nodes only need to correspond through a consistent renaming.
//!
//! The search refines a joint coloring of both modules until stable and then
//! backtracks over same-colored candidates, checking adjacency against the
//! partial mapping. It is exact: when the step budget runs out the answer is
//! an error, never a guess.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::IsoError;
use crate::module::{Label, Module, NodeId, NodeKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoOptions {
    /// Match labels of abstract nodes up to a bijective renaming.
    pub rename_abstract_cores: bool,
    /// Require identical node ids (structural equality) instead of searching.
    pub require_identical_atoms: bool,
    /// Maximum number of search steps before giving up.
    pub budget: u64,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            rename_abstract_cores: false,
            require_identical_atoms: false,
            budget: 1_000_000,
        }
    }
}

impl IsoOptions {
    pub fn renaming() -> Self {
        IsoOptions {
            rename_abstract_cores: true,
            ..Self::default()
        }
    }
}

/// A bijection from the nodes of the first module to those of the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub mapping: BTreeMap<NodeId, NodeId>,
}

impl IsoWitness {
    pub fn inverse(&self) -> IsoWitness {
        IsoWitness {
            mapping: self
                .mapping
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }
}

/// Identical node ids, labels, kinds, edges, markings and interfaces.
pub fn structural_equal(a: &Module, b: &Module) -> bool {
    a == b
}

fn renamed(opts: &IsoOptions, kind: NodeKind) -> bool {
    opts.rename_abstract_cores && kind == NodeKind::Abstract
}

/// Position of a node in an interface: label key and per-label index.
type Slot = Option<(Option<Label>, usize)>;

#[derive(Clone, PartialEq, Eq, Hash)]
struct BaseKey {
    kind: NodeKind,
    label: Option<Label>,
    tokens: u32,
    left: Slot,
    right: Slot,
    self_loop: bool,
}

struct Indexed<'a> {
    module: &'a Module,
    ids: Vec<&'a NodeId>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    edges: HashSet<(usize, usize)>,
    base: Vec<BaseKey>,
}

impl<'a> Indexed<'a> {
    fn new(m: &'a Module, opts: &IsoOptions) -> Self {
        let ids: Vec<&NodeId> = m.nodes().keys().collect();
        let pos: HashMap<&NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let n = ids.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut edges = HashSet::new();
        for (x, y) in m.edges() {
            let (i, j) = (pos[x], pos[y]);
            out[i].push(j);
            inn[j].push(i);
            edges.insert((i, j));
        }
        let slot_map =
            |iface: &crate::module::Interface| -> HashMap<usize, (Option<Label>, usize)> {
                iface
                    .indexed(|id| m.label(id))
                    .into_iter()
                    .map(|(id, l, k)| {
                        let kind = m.nodes()[id].kind;
                        let key = (!renamed(opts, kind)).then(|| l.clone());
                        (pos[id], (key, k))
                    })
                    .collect()
            };
        let left = slot_map(m.left());
        let right = slot_map(m.right());
        let base = ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let node = &m.nodes()[*id];
                BaseKey {
                    kind: node.kind,
                    label: (!renamed(opts, node.kind)).then(|| node.label.clone()),
                    tokens: m.tokens(id),
                    left: left.get(&i).cloned(),
                    right: right.get(&i).cloned(),
                    self_loop: edges.contains(&(i, i)),
                }
            })
            .collect();
        Indexed {
            module: m,
            ids,
            out,
            inn,
            edges,
            base,
        }
    }
}

/// Joint color refinement. Returns `None` when the color histograms of the
/// two modules differ at some round.
fn refine(a: &Indexed, b: &Indexed) -> Option<(Vec<u32>, Vec<u32>)> {
    let mut dict: HashMap<BaseKey, u32> = HashMap::new();
    let color = |k: &BaseKey, dict: &mut HashMap<BaseKey, u32>| {
        let next = dict.len() as u32;
        *dict.entry(k.clone()).or_insert(next)
    };
    let mut ca: Vec<u32> = a.base.iter().map(|k| color(k, &mut dict)).collect();
    let mut cb: Vec<u32> = b.base.iter().map(|k| color(k, &mut dict)).collect();
    let mut classes = dict.len();
    loop {
        if histogram(&ca) != histogram(&cb) {
            return None;
        }
        let mut sigs: HashMap<(u32, Vec<u32>, Vec<u32>), u32> = HashMap::new();
        let mut step = |g: &Indexed, c: &[u32]| -> Vec<u32> {
            (0..g.ids.len())
                .map(|v| {
                    let mut o: Vec<u32> = g.out[v].iter().map(|&w| c[w]).collect();
                    let mut i: Vec<u32> = g.inn[v].iter().map(|&w| c[w]).collect();
                    o.sort_unstable();
                    i.sort_unstable();
                    let next = sigs.len() as u32;
                    *sigs.entry((c[v], o, i)).or_insert(next)
                })
                .collect()
        };
        let na = step(a, &ca);
        let nb = step(b, &cb);
        let n_classes = sigs.len();
        ca = na;
        cb = nb;
        if n_classes <= classes {
            break;
        }
        classes = n_classes;
    }
    (histogram(&ca) == histogram(&cb)).then_some((ca, cb))
}

fn histogram(c: &[u32]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &x in c {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

struct Search<'s, 'a> {
    a: &'s Indexed<'a>,
    b: &'s Indexed<'a>,
    opts: &'s IsoOptions,
    order: Vec<usize>,
    candidates: HashMap<u32, Vec<usize>>,
    ca: Vec<u32>,
    fwd: Vec<Option<usize>>,
    rev: Vec<Option<usize>>,
    labels_fwd: HashMap<Label, (Label, usize)>,
    labels_rev: HashMap<Label, (Label, usize)>,
    steps: u64,
}

impl Search<'_, '_> {
    fn feasible(&self, v: usize, c: usize) -> bool {
        let (a, b) = (self.a, self.b);
        let mut mapped_out = 0;
        for &w in &a.out[v] {
            if let Some(x) = self.fwd[w] {
                if !b.edges.contains(&(c, x)) {
                    return false;
                }
                mapped_out += 1;
            }
        }
        if b.out[c].iter().filter(|&&x| self.rev[x].is_some()).count() != mapped_out {
            return false;
        }
        let mut mapped_in = 0;
        for &w in &a.inn[v] {
            if let Some(x) = self.fwd[w] {
                if !b.edges.contains(&(x, c)) {
                    return false;
                }
                mapped_in += 1;
            }
        }
        b.inn[c].iter().filter(|&&x| self.rev[x].is_some()).count() == mapped_in
    }

    /// Records the abstract-label correspondence of `v -> c`, if any.
    /// Returns false on conflict.
    fn bind_labels(&mut self, v: usize, c: usize) -> bool {
        let na = &self.a.module.nodes()[self.a.ids[v]];
        if !renamed(self.opts, na.kind) {
            return true;
        }
        let la = na.label.clone();
        let lb = self.b.module.nodes()[self.b.ids[c]].label.clone();
        match (self.labels_fwd.get(&la), self.labels_rev.get(&lb)) {
            (Some((x, _)), _) if *x != lb => false,
            (_, Some((y, _))) if *y != la => false,
            (Some(_), Some(_)) => {
                self.labels_fwd.get_mut(&la).unwrap().1 += 1;
                self.labels_rev.get_mut(&lb).unwrap().1 += 1;
                true
            }
            _ => {
                self.labels_fwd.insert(la.clone(), (lb.clone(), 1));
                self.labels_rev.insert(lb, (la, 1));
                true
            }
        }
    }

    fn unbind_labels(&mut self, v: usize, c: usize) {
        let na = &self.a.module.nodes()[self.a.ids[v]];
        if !renamed(self.opts, na.kind) {
            return;
        }
        let la = na.label.clone();
        let lb = self.b.module.nodes()[self.b.ids[c]].label.clone();
        let e = self.labels_fwd.get_mut(&la).unwrap();
        e.1 -= 1;
        if e.1 == 0 {
            self.labels_fwd.remove(&la);
            self.labels_rev.remove(&lb);
        } else {
            self.labels_rev.get_mut(&lb).unwrap().1 -= 1;
        }
    }

    fn witness(&self) -> IsoWitness {
        IsoWitness {
            mapping: self
                .fwd
                .iter()
                .enumerate()
                .map(|(v, c)| (self.a.ids[v].clone(), self.b.ids[c.unwrap()].clone()))
                .collect(),
        }
    }

    fn run(&mut self, depth: usize) -> Result<Option<IsoWitness>, IsoError> {
        self.steps += 1;
        if self.steps > self.opts.budget {
            return Err(IsoError::SearchBudgetExceeded(self.opts.budget));
        }
        if depth == self.order.len() {
            let w = self.witness();
            let ok = verify_witness(self.a.module, self.b.module, &w, self.opts);
            return Ok(ok.then_some(w));
        }
        let v = self.order[depth];
        let cands = self.candidates[&self.ca[v]].clone();
        for c in cands {
            if self.rev[c].is_some() || !self.feasible(v, c) {
                continue;
            }
            if !self.bind_labels(v, c) {
                continue;
            }
            self.fwd[v] = Some(c);
            self.rev[c] = Some(v);
            if let Some(w) = self.run(depth + 1)? {
                return Ok(Some(w));
            }
            self.fwd[v] = None;
            self.rev[c] = None;
            self.unbind_labels(v, c);
        }
        Ok(None)
    }
}

/// Matching order: rarest color first, then the node with the most already
/// ordered neighbors.
fn matching_order(g: &Indexed, colors: &[u32]) -> Vec<usize> {
    let n = g.ids.len();
    let hist = histogram(colors);
    let rarity = |v: usize| hist[&colors[v]];
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (std::cmp::Reverse(links[v]), rarity(v), v))
            .unwrap();
        placed[v] = true;
        order.push(v);
        for &w in g.out[v].iter().chain(&g.inn[v]) {
            links[w] += 1;
        }
    }
    order
}

/// Searches for an isomorphism from `a` to `b`.
pub fn isomorphic(
    a: &Module,
    b: &Module,
    opts: &IsoOptions,
) -> Result<Option<IsoWitness>, IsoError> {
    if opts.require_identical_atoms {
        return Ok(structural_equal(a, b).then(|| IsoWitness {
            mapping: a
                .nodes()
                .keys()
                .map(|id| (id.clone(), id.clone()))
                .collect(),
        }));
    }
    if a.nodes().len() != b.nodes().len()
        || a.edges().len() != b.edges().len()
        || a.left().len() != b.left().len()
        || a.right().len() != b.right().len()
        || a.total_tokens() != b.total_tokens()
    {
        return Ok(None);
    }
    let ia = Indexed::new(a, opts);
    let ib = Indexed::new(b, opts);
    let Some((ca, cb)) = refine(&ia, &ib) else {
        return Ok(None);
    };
    let mut candidates: HashMap<u32, Vec<usize>> = HashMap::new();
    for (c, &col) in cb.iter().enumerate() {
        candidates.entry(col).or_default().push(c);
    }
    let order = matching_order(&ia, &ca);
    let n = ia.ids.len();
    let mut s = Search {
        a: &ia,
        b: &ib,
        opts,
        order,
        candidates,
        ca,
        fwd: vec![None; n],
        rev: vec![None; n],
        labels_fwd: HashMap::new(),
        labels_rev: HashMap::new(),
        steps: 0,
    };
    s.run(0)
}

/// Replays a witness: bijectivity, labels (or a consistent renaming of
/// abstract labels), kinds, markings, edges in both directions, and the
/// per-label index of every interface slot on both sides.
pub fn verify_witness(a: &Module, b: &Module, w: &IsoWitness, opts: &IsoOptions) -> bool {
    let f = &w.mapping;
    if f.len() != a.nodes().len() || a.nodes().len() != b.nodes().len() {
        return false;
    }
    if !a.nodes().keys().all(|x| f.contains_key(x)) {
        return false;
    }
    let image: HashSet<&NodeId> = f.values().collect();
    if image.len() != f.len() || !image.iter().all(|y| b.nodes().contains_key(*y)) {
        return false;
    }
    let mut fwd: HashMap<&Label, &Label> = HashMap::new();
    let mut rev: HashMap<&Label, &Label> = HashMap::new();
    for (x, y) in f {
        let (nx, ny) = (&a.nodes()[x], &b.nodes()[y]);
        if nx.kind != ny.kind || a.tokens(x) != b.tokens(y) {
            return false;
        }
        if renamed(opts, nx.kind) {
            if *fwd.entry(&nx.label).or_insert(&ny.label) != &ny.label
                || *rev.entry(&ny.label).or_insert(&nx.label) != &nx.label
            {
                return false;
            }
        } else if nx.label != ny.label {
            return false;
        }
    }
    if a.edges().len() != b.edges().len()
        || !a
            .edges()
            .iter()
            .all(|(x, z)| b.edges().contains(&(f[x].clone(), f[z].clone())))
    {
        return false;
    }
    let same_slots = |sa: &crate::module::Interface, sb: &crate::module::Interface| {
        let ga = sa.by_label(|id| a.label(id));
        let gb = sb.by_label(|id| b.label(id));
        ga.len() == gb.len()
            && ga.iter().all(|(l, xs)| {
                let lb = match fwd.get(l) {
                    Some(m) if renamed(opts, a.nodes()[xs[0]].kind) => (*m).clone(),
                    _ => l.clone(),
                };
                gb.get(&lb).is_some_and(|ys| {
                    ys.len() == xs.len() && xs.iter().zip(ys).all(|(x, y)| &f[*x] == *y)
                })
            })
    };
    same_slots(a.left(), b.left()) && same_slots(a.right(), b.right())
}
