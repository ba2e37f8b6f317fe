//! Tries every placement of the philosopher snippets' interface elements and
//! reports which placements make the two ring constructions isomorphic.

use netmod::*;

#[derive(Clone, Copy, Debug)]
enum Side {
    Inner,
    Left,
    Right,
    Both,
}

const SIDES: [Side; 4] = [Side::Inner, Side::Left, Side::Right, Side::Both];

fn iface(items: &[(&str, Side)]) -> (String, String) {
    let pick = |want_left: bool| {
        items
            .iter()
            .filter(|(_, s)| match s {
                Side::Inner => false,
                Side::Left => want_left,
                Side::Right => !want_left,
                Side::Both => true,
            })
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join(", ")
    };
    (pick(true), pick(false))
}

fn source(lu: (Side, Side), ru: (Side, Side), th: Side, ea: Side) -> String {
    let snippet = |name: &str, place: &str, marking: u32, arcs: &str, t: Side, p: Option<Side>| {
        let mut items = vec![("take", t), ("return", t)];
        if let Some(p) = p {
            items.push((place, p));
        }
        let (l, r) = iface(&items);
        format!(
            "module {name} {{ place {place} label {place} marking {marking}; \
             transition take label take; transition return label return; {arcs} \
             left: {l}; right: {r} }}\n"
        )
    };
    let mut s = String::from(
        "alphabet { places: available, thinking, eating; transitions: take, return }\n",
    );
    s += &snippet(
        "left_use",
        "available",
        1,
        "arc available -> take; arc return -> available;",
        lu.0,
        Some(lu.1),
    );
    s += &snippet(
        "right_use",
        "available",
        0,
        "arc available -> take; arc return -> available;",
        ru.0,
        Some(ru.1),
    );
    s += &snippet(
        "think",
        "thinking",
        1,
        "arc thinking -> take; arc return -> thinking;",
        th,
        None,
    );
    s += &snippet(
        "eat",
        "eating",
        0,
        "arc take -> eating; arc eating -> return;",
        ea,
        None,
    );
    s += "fork := left_use . right_use
fork_with_users := think . fork . eat
forks_in_a_row := fork_with_users . fork_with_users . fork_with_users . fork_with_users . fork_with_users
forks_in_a_cycle := (forks_in_a_row)^c
phil := think . eat
phil_with_forks := left_use . phil . right_use
phils_in_a_row := phil_with_forks . phil_with_forks . phil_with_forks . phil_with_forks . phil_with_forks
phils_in_a_cycle := (phils_in_a_row)^c
";
    s
}

fn is_ring(m: &Module) -> bool {
    match validate_net(m) {
        Ok(n) => n.transitions().len() == 10 && n.places().len() == 15,
        Err(_) => false,
    }
}

fn main() {
    let (mut tried, mut both_rings, mut forks_ok, mut phils_ok) = (0, 0, 0, 0);
    for lu in SIDES
        .iter()
        .flat_map(|a| SIDES.iter().map(move |b| (*a, *b)))
    {
        for ru in SIDES
            .iter()
            .flat_map(|a| SIDES.iter().map(move |b| (*a, *b)))
        {
            for th in SIDES {
                for ea in SIDES {
                    tried += 1;
                    let env = parse(&source(lu, ru, th, ea)).expect("generated source parses");
                    let (Ok(f), Ok(p)) = (
                        dsl::eval_binding(&env, "forks_in_a_cycle"),
                        dsl::eval_binding(&env, "phils_in_a_cycle"),
                    ) else {
                        continue;
                    };
                    let fr = is_ring(&f) && f.left().is_empty() && f.right().is_empty();
                    let pr = is_ring(&p) && p.left().is_empty() && p.right().is_empty();
                    forks_ok += usize::from(fr);
                    phils_ok += usize::from(pr);
                    if fr && pr {
                        let iso = isomorphic(&f, &p, &IsoOptions::default())
                            .map(|w| w.is_some())
                            .unwrap_or(false);
                        if iso {
                            both_rings += 1;
                            println!(
                                "works: left_use={lu:?} right_use={ru:?} think={th:?} eat={ea:?}"
                            );
                        }
                    }
                }
            }
        }
    }
    println!("placements tried: {tried}");
    println!("forks path gives the 5-ring: {forks_ok}");
    println!("phils path gives the 5-ring: {phils_ok}");
    println!("both, isomorphic: {both_rings}");
}
