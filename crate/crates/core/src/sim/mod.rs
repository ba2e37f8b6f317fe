//! Token game and bounded reachability for place/transition nets with arc
//! weight 1.

mod predicate;

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::SimError;
use crate::module::NodeId;
use crate::net::NetView;

pub use predicate::Predicate;

/// Multiset of places. Zero counts are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeMap<NodeId, u32>);

impl Marking {
    pub fn new(counts: impl IntoIterator<Item = (NodeId, u32)>) -> Self {
        Marking(counts.into_iter().filter(|(_, c)| *c > 0).collect())
    }

    /// The initial marking carried by the net.
    pub fn initial(net: &NetView) -> Self {
        Marking::new(net.marking().iter().map(|(p, c)| (p.clone(), *c)))
    }

    pub fn get(&self, p: &NodeId) -> u32 {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, u32)> {
        self.0.iter().map(|(p, c)| (p, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, net: &NetView) -> Result<(), SimError> {
        match self.0.keys().find(|p| !net.places().contains(*p)) {
            Some(p) => Err(SimError::InvalidMarking(p.to_string())),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for Marking {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (i, (p, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}: {c}")?;
        }
        f.write_str("}")
    }
}

/// Transitions enabled at `m`, in id order.
pub fn enabled<'n>(net: &'n NetView, m: &Marking) -> Vec<&'n NodeId> {
    net.transitions()
        .iter()
        .filter(|t| net.preset(t).iter().all(|p| m.get(p) >= 1))
        .collect()
}

/// `m - pre(t) + post(t)`.
pub fn fire(net: &NetView, m: &Marking, t: &NodeId) -> Result<Marking, SimError> {
    if !net.transitions().contains(t) {
        return Err(SimError::UnknownTransition(t.to_string()));
    }
    let pre = net.preset(t);
    if pre.iter().any(|p| m.get(p) == 0) {
        return Err(SimError::NotEnabled(t.to_string()));
    }
    let mut counts = m.0.clone();
    for p in pre {
        *counts.get_mut(p).expect("marked") -= 1;
    }
    for p in net.postset(t) {
        *counts.entry(p.clone()).or_insert(0) += 1;
    }
    Ok(Marking::new(counts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReachCaps {
    pub max_markings: usize,
    pub max_tokens_per_place: u32,
}

impl Default for ReachCaps {
    fn default() -> Self {
        ReachCaps {
            max_markings: 1_000_000,
            max_tokens_per_place: 16,
        }
    }
}

/// Reachability graph in breadth-first order. State 0 is the root; states
/// are dense token vectors over `places`.
#[derive(Clone, Debug)]
pub struct ReachGraph {
    places: Vec<NodeId>,
    transitions: Vec<NodeId>,
    states: Vec<Vec<u32>>,
    /// `(source state, transition index, target state)`
    arcs: Vec<(usize, usize, usize)>,
    parent: Vec<Option<(usize, usize)>>,
    pub truncated: bool,
}

impl ReachGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn places(&self) -> &[NodeId] {
        &self.places
    }

    pub fn transitions(&self) -> &[NodeId] {
        &self.transitions
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn marking(&self, i: usize) -> Marking {
        Marking::new(
            self.places
                .iter()
                .cloned()
                .zip(self.states[i].iter().copied()),
        )
    }

    pub fn markings(&self) -> impl Iterator<Item = Marking> + '_ {
        (0..self.len()).map(|i| self.marking(i))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, &NodeId, usize)> {
        self.arcs
            .iter()
            .map(|&(a, t, b)| (a, &self.transitions[t], b))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn index_of(&self, m: &Marking) -> Option<usize> {
        let v: Vec<u32> = self.places.iter().map(|p| m.get(p)).collect();
        self.states.iter().position(|s| *s == v)
    }

    /// Firing sequence from the root to state `i` along the BFS tree.
    pub fn path_to(&self, mut i: usize) -> Vec<NodeId> {
        let mut path = Vec::new();
        while let Some((prev, t)) = self.parent[i] {
            path.push(self.transitions[t].clone());
            i = prev;
        }
        path.reverse();
        path
    }

    fn reaches_all_backwards(&self, target: usize) -> bool {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(a, _, b) in &self.arcs {
            rev[b].push(a);
        }
        let mut seen = vec![false; self.len()];
        seen[target] = true;
        let mut queue = VecDeque::from([target]);
        while let Some(x) = queue.pop_front() {
            for &y in &rev[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True iff state `i` is reachable from every state.
    pub fn is_home_state(&self, i: usize) -> bool {
        i < self.len() && self.reaches_all_backwards(i)
    }

    /// True iff the graph is strongly connected.
    pub fn is_reversible(&self) -> bool {
        self.is_empty() || self.is_home_state(0)
    }

    /// Markings with no enabled transition.
    pub fn deadlocks(&self) -> Vec<usize> {
        let mut out_deg = vec![0usize; self.len()];
        for &(a, _, _) in &self.arcs {
            out_deg[a] += 1;
        }
        (0..self.len()).filter(|&i| out_deg[i] == 0).collect()
    }
}

/// Breadth-first exploration from `m0`. Successors are generated in
/// transition id order. Markings beyond `caps` are dropped and flag the
/// graph as truncated.
pub fn reachability(net: &NetView, m0: &Marking, caps: ReachCaps) -> Result<ReachGraph, SimError> {
    m0.check(net)?;
    let places: Vec<NodeId> = net.places().iter().cloned().collect();
    let transitions: Vec<NodeId> = net.transitions().iter().cloned().collect();
    let pidx: BTreeMap<&NodeId, usize> = places.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let pre: Vec<Vec<usize>> = transitions
        .iter()
        .map(|t| net.preset(t).into_iter().map(|p| pidx[p]).collect())
        .collect();
    let post: Vec<Vec<usize>> = transitions
        .iter()
        .map(|t| net.postset(t).into_iter().map(|p| pidx[p]).collect())
        .collect();

    let root: Vec<u32> = places.iter().map(|p| m0.get(p)).collect();
    let mut g = ReachGraph {
        places,
        transitions,
        states: Vec::new(),
        arcs: Vec::new(),
        parent: Vec::new(),
        truncated: false,
    };
    if caps.max_markings == 0 {
        g.truncated = true;
        return Ok(g);
    }
    if root.iter().any(|&c| c > caps.max_tokens_per_place) {
        g.truncated = true;
    }
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    index.insert(root.clone(), 0);
    g.states.push(root);
    g.parent.push(None);

    let mut next = 0;
    while next < g.states.len() {
        let cur = g.states[next].clone();
        for t in 0..g.transitions.len() {
            if pre[t].iter().any(|&p| cur[p] == 0) {
                continue;
            }
            let mut m = cur.clone();
            for &p in &pre[t] {
                m[p] -= 1;
            }
            for &p in &post[t] {
                m[p] += 1;
            }
            if m.iter().any(|&c| c > caps.max_tokens_per_place) {
                g.truncated = true;
                continue;
            }
            let target = match index.get(&m) {
                Some(&j) => j,
                None => {
                    if g.states.len() >= caps.max_markings {
                        g.truncated = true;
                        continue;
                    }
                    let j = g.states.len();
                    index.insert(m.clone(), j);
                    g.states.push(m);
                    g.parent.push(Some((next, t)));
                    j
                }
            };
            g.arcs.push((next, t, target));
        }
        next += 1;
    }
    Ok(g)
}

/// A reachable marking violating an invariant, with a firing sequence that
/// leads to it from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub state: usize,
    pub marking: Marking,
    pub path: Vec<NodeId>,
}

/// First marking in BFS order for which `holds` is false. On a truncated
/// graph a `None` only covers the explored part.
pub fn check_invariant(
    g: &ReachGraph,
    mut holds: impl FnMut(&Marking) -> bool,
) -> Option<Counterexample> {
    (0..g.len()).find_map(|i| {
        let m = g.marking(i);
        if holds(&m) {
            None
        } else {
            Some(Counterexample {
                state: i,
                marking: m,
                path: g.path_to(i),
            })
        }
    })
}
