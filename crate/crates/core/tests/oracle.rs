//! Composition and closure recomputed from the index formulas, compared
//! against the library on random modules.

mod common;

use common::oracle::{actual, oracle_closure, oracle_compose, Expected};

use netmod::dsl::Evaluator;
use netmod::random::{random_module, rng, ModuleShape};
use netmod::{closure, compose};
use proptest::prelude::*;

fn same(got: &Expected, want: &Expected) -> Result<(), TestCaseError> {
    prop_assert_eq!(&got.nodes, &want.nodes);
    prop_assert_eq!(&got.edges, &want.edges);
    prop_assert_eq!(&got.left, &want.left);
    prop_assert_eq!(&got.right, &want.right);
    prop_assert_eq!(&got.marking, &want.marking);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn compose_follows_the_index_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_module(&mut r, "A", ModuleShape::default());
        let b = random_module(&mut r, "B", ModuleShape::default());
        let got = compose(&a, &b).unwrap();
        same(&actual(&got), &oracle_compose(&a, &b))?;
    }

    #[test]
    fn closure_of_modules_without_shared_slots_follows_the_index_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_module(&mut r, "A", ModuleShape::default());
        // The index rule is only stated for pairs of distinct nodes.
        prop_assume!(a.left().slots().iter().all(|s| !a.right().contains(s)));
        same(&actual(&closure(&a)), &oracle_closure(&a))?;
    }
}

#[test]
fn production_line_interfaces_by_hand() {
    let env = common::fixture("production.hkl");
    let three = common::eval(&env, "three_then_two");
    let mut ev = Evaluator::new(&env);
    let mut get = |n: &str| ev.eval_name(n).unwrap();
    let (p1, p2, p3) = (get("production"), get("production"), get("production"));
    let (k1, k2) = (get("pack"), get("pack"));
    let ppp = compose(&compose(&p1, &p2).unwrap(), &p3).unwrap();
    let pp = compose(&k1, &k2).unwrap();
    // Two product pairs; the third product has n = 3, p = 0 (no product in
    // the packs' right side), m = 2, so it ends up at index 1.
    let want = oracle_compose(&ppp, &pp);
    let products: Vec<_> = want
        .right
        .iter()
        .filter(|(_, l, _)| l.as_str() == "product")
        .collect();
    assert_eq!(products.len(), 1);
    assert_eq!(products[0].2, 1);
    let got = compose(&ppp, &pp).unwrap();
    let shape = |e: &Expected| -> Vec<(String, usize)> {
        let mut v: Vec<_> = e
            .right
            .iter()
            .map(|(_, l, k)| (l.to_string(), *k))
            .collect();
        v.sort();
        v
    };
    assert_eq!(shape(&actual(&got)), shape(&want));
    assert_eq!(
        shape(&actual(&three)),
        vec![
            ("parcel".into(), 1),
            ("parcel".into(), 2),
            ("product".into(), 1)
        ]
    );
}
