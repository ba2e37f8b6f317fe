//! Seeded random modules and nets, and a runner for the algebraic laws.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{abstract_of, closure, compose, empty_module};
use crate::iso::{isomorphic, IsoOptions};
use crate::module::{
    check_interfaces_well_formed, Interface, Label, Module, Node, NodeId, NodeKind,
};
use crate::net::{factorize, NetView};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub const PLACE_LABELS: [&str; 3] = ["a", "b", "c"];
pub const TRANSITION_LABELS: [&str; 3] = ["x", "y", "z"];

/// Size bounds for [`random_module`].
#[derive(Clone, Copy, Debug)]
pub struct ModuleShape {
    pub max_nodes: usize,
    pub max_labels_per_side: usize,
    pub edge_probability: f64,
    pub max_tokens: u32,
}

impl Default for ModuleShape {
    fn default() -> Self {
        ModuleShape {
            max_nodes: 12,
            max_labels_per_side: 4,
            edge_probability: 0.2,
            max_tokens: 2,
        }
    }
}

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random module whose node ids all carry the instance `tag`. Labels come
/// from [`PLACE_LABELS`] and [`TRANSITION_LABELS`]; a node may sit in both
/// interfaces. The module is named `tag`.
pub fn random_module(rng: &mut impl Rng, tag: &str, shape: ModuleShape) -> Module {
    let n = rng.gen_range(0..=shape.max_nodes);
    let mut nodes = BTreeMap::new();
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let id = NodeId::atom(tag, format!("v{i}"));
        let node = if rng.gen_bool(0.5) {
            Node::new(*PLACE_LABELS.choose(rng).expect("labels"), NodeKind::Place)
        } else {
            Node::new(
                *TRANSITION_LABELS.choose(rng).expect("labels"),
                NodeKind::Transition,
            )
        };
        nodes.insert(id.clone(), node);
        ids.push(id);
    }
    let mut edges = BTreeSet::new();
    for a in &ids {
        for b in &ids {
            if rng.gen_bool(shape.edge_probability) {
                edges.insert((a.clone(), b.clone()));
            }
        }
    }
    let left = random_side(rng, &ids, &nodes, shape.max_labels_per_side);
    let right = random_side(rng, &ids, &nodes, shape.max_labels_per_side);
    let marking = ids
        .iter()
        .filter(|id| nodes[*id].kind == NodeKind::Place)
        .map(|id| (id.clone(), rng.gen_range(0..=shape.max_tokens)))
        .collect();
    Module::new(nodes, edges, left, right, marking)
        .expect("generated module is valid")
        .with_name(tag)
}

fn random_side(
    rng: &mut impl Rng,
    ids: &[NodeId],
    nodes: &BTreeMap<NodeId, Node>,
    max_labels: usize,
) -> Interface {
    let all: Vec<&str> = PLACE_LABELS
        .iter()
        .chain(&TRANSITION_LABELS)
        .copied()
        .collect();
    let k = rng.gen_range(0..=max_labels.min(all.len()));
    let allowed: BTreeSet<&str> = all.choose_multiple(rng, k).copied().collect();
    let mut slots = Vec::new();
    for id in ids {
        if allowed.contains(nodes[id].label.as_str()) && rng.gen_bool(0.6) {
            slots.push(id.clone());
        }
    }
    slots.shuffle(rng);
    Interface::new(slots)
}

/// Size bounds for [`random_net`].
#[derive(Clone, Copy, Debug)]
pub struct NetShape {
    pub max_places: usize,
    pub max_transitions: usize,
    pub arc_probability: f64,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape {
            max_places: 20,
            max_transitions: 15,
            arc_probability: 0.15,
        }
    }
}

/// A random net with at least one place and one transition and no isolated
/// element. Elements are labeled by their identity.
pub fn random_net(rng: &mut impl Rng, tag: &str, shape: NetShape) -> NetView {
    let np = rng.gen_range(1..=shape.max_places);
    let nt = rng.gen_range(1..=shape.max_transitions);
    let places: Vec<NodeId> = (0..np)
        .map(|i| NodeId::atom(tag, format!("p{i}")))
        .collect();
    let trans: Vec<NodeId> = (0..nt)
        .map(|i| NodeId::atom(tag, format!("t{i}")))
        .collect();
    let mut flow = BTreeSet::new();
    for p in &places {
        for t in &trans {
            if rng.gen_bool(shape.arc_probability) {
                flow.insert((p.clone(), t.clone()));
            }
            if rng.gen_bool(shape.arc_probability) {
                flow.insert((t.clone(), p.clone()));
            }
        }
    }
    let touched =
        |flow: &BTreeSet<(NodeId, NodeId)>, x: &NodeId| flow.iter().any(|(a, b)| a == x || b == x);
    for p in &places {
        if !touched(&flow, p) {
            let t = trans.choose(rng).expect("transitions").clone();
            if rng.gen_bool(0.5) {
                flow.insert((p.clone(), t));
            } else {
                flow.insert((t, p.clone()));
            }
        }
    }
    for t in &trans {
        if !touched(&flow, t) {
            let p = places.choose(rng).expect("places").clone();
            if rng.gen_bool(0.5) {
                flow.insert((p, t.clone()));
            } else {
                flow.insert((t.clone(), p));
            }
        }
    }
    let mut marking = BTreeMap::new();
    for p in &places {
        if rng.gen_bool(0.3) {
            marking.insert(p.clone(), rng.gen_range(1..=2));
        }
    }
    NetView::new(
        places.into_iter().collect(),
        trans.into_iter().collect(),
        flow,
        marking,
    )
    .expect("generated net is valid")
}

/// Outcome of one law over many generated cases.
#[derive(Clone, Debug)]
pub struct LawResult {
    pub law: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
}

impl LawResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn run_law(
    law: &'static str,
    cases: usize,
    seed: u64,
    mut case: impl FnMut(&mut Rng64, usize) -> Result<(), String>,
) -> LawResult {
    let start = Instant::now();
    let mut rng = rng(seed);
    let mut failures = 0;
    let mut first_failure = None;
    for i in 0..cases {
        if let Err(e) = case(&mut rng, i) {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("case {i}: {e}"));
        }
    }
    LawResult {
        law,
        cases,
        failures,
        first_failure,
        elapsed: start.elapsed(),
    }
}

fn well_formed(what: &str, m: &Module) -> Result<(), String> {
    check_interfaces_well_formed(m)
        .and_then(|_| m.validate())
        .map_err(|e| format!("{what} is not well formed: {e}"))
}

fn labels_on_both_sides(m: &Module) -> BTreeSet<Label> {
    let l: BTreeSet<Label> = m.left_by_label().into_keys().collect();
    let r: BTreeSet<Label> = m.right_by_label().into_keys().collect();
    l.intersection(&r).cloned().collect()
}

/// `(A • B) • C = A • (B • C)`, structurally.
pub fn associativity(cases: usize, seed: u64) -> LawResult {
    run_law("associativity", cases, seed, |rng, i| {
        let sh = ModuleShape::default();
        let a = random_module(rng, &format!("A{i}"), sh);
        let b = random_module(rng, &format!("B{i}"), sh);
        let c = random_module(rng, &format!("C{i}"), sh);
        let ab = compose(&a, &b).map_err(|e| e.to_string())?;
        let bc = compose(&b, &c).map_err(|e| e.to_string())?;
        let l = compose(&ab, &c).map_err(|e| e.to_string())?;
        let r = compose(&a, &bc).map_err(|e| e.to_string())?;
        for (w, m) in [("A•B", &ab), ("B•C", &bc), ("(A•B)•C", &l), ("A•(B•C)", &r)] {
            well_formed(w, m)?;
        }
        if l == r {
            Ok(())
        } else {
            Err("(A•B)•C differs from A•(B•C)".into())
        }
    })
}

/// `E • A = A • E = A`, structurally.
pub fn identity(cases: usize, seed: u64) -> LawResult {
    run_law("identity", cases, seed, |rng, i| {
        let a = random_module(rng, &format!("A{i}"), ModuleShape::default());
        let e = empty_module();
        let ea = compose(&e, &a).map_err(|e| e.to_string())?;
        let ae = compose(&a, &e).map_err(|e| e.to_string())?;
        well_formed("E•A", &ea)?;
        well_formed("A•E", &ae)?;
        if ea != a {
            return Err("E•A differs from A".into());
        }
        if ae != a {
            return Err("A•E differs from A".into());
        }
        Ok(())
    })
}

/// `(A^c)^c = A^c`, and no label is on both sides of `A^c`.
pub fn idempotence(cases: usize, seed: u64) -> LawResult {
    run_law("closure idempotence", cases, seed, |rng, i| {
        let a = random_module(rng, &format!("A{i}"), ModuleShape::default());
        let c = closure(&a);
        let cc = closure(&c);
        well_formed("A^c", &c)?;
        well_formed("(A^c)^c", &cc)?;
        let both = labels_on_both_sides(&c);
        if !both.is_empty() {
            return Err(format!("labels on both sides of A^c: {both:?}"));
        }
        if cc != c {
            return Err("(A^c)^c differs from A^c".into());
        }
        Ok(())
    })
}

/// `abstr(abstr(A)) ≅ abstr(A)` and `abstr(A•B) ≅ abstr(abstr(A)•abstr(B))`,
/// both up to renaming of abstract cores.
pub fn abstraction(cases: usize, seed: u64) -> LawResult {
    run_law("abstraction", cases, seed, |rng, i| {
        let sh = ModuleShape::default();
        let a = random_module(rng, &format!("A{i}"), sh);
        let b = random_module(rng, &format!("B{i}"), sh);
        let opts = IsoOptions::renaming();
        let iso = |x: &Module, y: &Module| -> Result<bool, String> {
            isomorphic(x, y, &opts)
                .map(|w| w.is_some())
                .map_err(|e| e.to_string())
        };
        let err = |e: crate::error::CalcError| e.to_string();

        let aa = abstract_of(&a).map_err(err)?;
        let aaa = abstract_of(&aa).map_err(err)?;
        well_formed("abstr(A)", &aa)?;
        well_formed("abstr(abstr(A))", &aaa)?;
        if !iso(&aaa, &aa)? {
            return Err("abstr(abstr(A)) is not isomorphic to abstr(A)".into());
        }

        let name = format!("{}•{}", a.name().unwrap_or(""), b.name().unwrap_or(""));
        let ab = compose(&a, &b).map_err(err)?.with_name(name.clone());
        let lhs = abstract_of(&ab).map_err(err)?;
        let ab2 = compose(&aa, &abstract_of(&b).map_err(err)?)
            .map_err(err)?
            .with_name(name);
        let rhs = abstract_of(&ab2).map_err(err)?;
        well_formed("abstr(A•B)", &lhs)?;
        well_formed("abstr(abstr(A)•abstr(B))", &rhs)?;
        if !iso(&lhs, &rhs)? {
            return Err("abstr(A•B) is not isomorphic to abstr(abstr(A)•abstr(B))".into());
        }
        Ok(())
    })
}

/// The composition of the transition atoms of a net is isomorphic to the
/// net read as a monolithic module.
pub fn completeness(cases: usize, seed: u64) -> LawResult {
    run_law("completeness", cases, seed, |rng, i| {
        let n = random_net(rng, &format!("N{i}"), NetShape::default());
        let f = factorize(&n).map_err(|e| e.to_string())?;
        for (k, atom) in f.atoms.iter().enumerate() {
            well_formed(&format!("atom {k}"), atom)?;
        }
        well_formed("recomposition", &f.recomposed)?;
        if f.matches {
            Ok(())
        } else {
            Err("recomposed atoms are not isomorphic to the net".into())
        }
    })
}

/// Case counts for [`selftest`].
#[derive(Clone, Copy, Debug)]
pub struct SelftestCounts {
    pub associativity: usize,
    pub identity: usize,
    pub idempotence: usize,
    pub abstraction: usize,
    pub completeness: usize,
}

impl Default for SelftestCounts {
    fn default() -> Self {
        SelftestCounts {
            associativity: 1000,
            identity: 1000,
            idempotence: 1000,
            abstraction: 300,
            completeness: 300,
        }
    }
}

/// Runs every law. Each law gets its own stream derived from `seed`.
pub fn selftest(seed: u64, counts: SelftestCounts) -> Vec<LawResult> {
    vec![
        associativity(counts.associativity, seed),
        identity(counts.identity, seed.wrapping_add(1)),
        idempotence(counts.idempotence, seed.wrapping_add(2)),
        abstraction(counts.abstraction, seed.wrapping_add(3)),
        completeness(counts.completeness, seed.wrapping_add(4)),
    ]
}
