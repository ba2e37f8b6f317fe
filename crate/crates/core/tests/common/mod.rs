#![allow(dead_code)]

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use netmod::dsl::{eval_binding, parse, Environment};
use netmod::sim::{enabled, fire, Marking};
use netmod::{Label, Module, NetView, NodeId};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Environment {
    let src = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse(&src).expect("fixture parses")
}

pub fn eval(env: &Environment, name: &str) -> Module {
    eval_binding(env, name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Plain breadth-first search over `Marking` values through the public
/// `enabled`/`fire` API.
pub fn bfs_markings(net: &NetView, m0: &Marking) -> BTreeSet<Marking> {
    let mut seen = BTreeSet::from([m0.clone()]);
    let mut queue = VecDeque::from([m0.clone()]);
    while let Some(m) = queue.pop_front() {
        for t in enabled(net, &m) {
            let next = fire(net, &m, t).expect("enabled transition fires");
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

pub fn places_labeled<'n>(net: &'n NetView, label: &str) -> Vec<&'n NodeId> {
    net.places()
        .iter()
        .filter(|p| net.label(p) == Label::new(label))
        .collect()
}

/// Pairs of eating places whose philosophers compete for a common fork:
/// their take transitions share an input place.
pub fn neighbor_eating_pairs(net: &NetView) -> Vec<(NodeId, NodeId)> {
    let eating = places_labeled(net, "eating");
    let inputs: BTreeMap<&NodeId, BTreeSet<&NodeId>> = eating
        .iter()
        .map(|e| {
            let ins = net
                .preset(e)
                .into_iter()
                .flat_map(|t| net.preset(t))
                .filter(|p| net.label(p) == Label::new("available"))
                .collect();
            (*e, ins)
        })
        .collect();
    let mut out = Vec::new();
    for (i, a) in eating.iter().enumerate() {
        for b in &eating[i + 1..] {
            if !inputs[a].is_disjoint(&inputs[b]) {
                out.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}
