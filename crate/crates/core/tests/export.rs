mod common;

use std::io::Write;
use std::process::{Command, Stdio};

use common::{eval, fixture, fixture_path};
use netmod::dsl::parse;
use netmod::export::{check_pnml, dump, load, to_dot, to_pnml};
use netmod::{validate_net, Module};

fn schema_path() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema/ptnet.rng")
}

/// Validates against the bundled RELAX NG schema with Python's lxml, when
/// available. Returns `None` if no validator could be run.
fn relaxng(xml: &str) -> Option<Result<(), String>> {
    let script = "import sys\nfrom lxml import etree\n\
        s = etree.RelaxNG(etree.parse(sys.argv[1]))\n\
        d = etree.fromstring(sys.stdin.buffer.read())\n\
        ok = s.validate(d)\n\
        print(s.error_log)\n\
        sys.exit(0 if ok else 1)\n";
    let mut child = Command::new("python3")
        .arg("-c")
        .arg(script)
        .arg(schema_path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .ok()?;
    child.stdin.take()?.write_all(xml.as_bytes()).ok()?;
    let out = child.wait_with_output().ok()?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    if stderr.contains("ModuleNotFoundError") {
        return None;
    }
    Some(if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{}{}",
            String::from_utf8_lossy(&out.stdout),
            stderr
        ))
    })
}

fn net_bindings() -> Vec<(String, Module)> {
    let mut out = Vec::new();
    for file in [
        "philosophers.hkl",
        "philosophers_mirrored.hkl",
        "production.hkl",
    ] {
        let env = fixture(file);
        for (name, _) in env.bindings() {
            let m = eval(&env, name);
            if validate_net(&m).is_ok() {
                out.push((format!("{file}:{name}"), m));
            }
        }
    }
    out
}

#[test]
fn every_fixture_net_exports_valid_pnml() {
    let nets = net_bindings();
    assert!(nets.len() >= 20);
    let mut schema_checked = 0;
    for (name, m) in &nets {
        let x = to_pnml(m).unwrap();
        let s = check_pnml(&x).unwrap_or_else(|e| panic!("{name}: {e}"));
        let net = validate_net(m).unwrap();
        assert_eq!(s.places, net.places().len(), "{name}");
        assert_eq!(s.transitions, net.transitions().len(), "{name}");
        if let Some(r) = relaxng(&x) {
            r.unwrap_or_else(|e| panic!("{name}: {e}"));
            schema_checked += 1;
        }
    }
    let have_lxml = Command::new("python3")
        .args(["-c", "import lxml.etree"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false);
    if have_lxml {
        assert_eq!(schema_checked, nets.len());
    } else {
        eprintln!("note: python3 with lxml not found; RELAX NG validation skipped");
    }
}

#[test]
fn schema_rejects_what_the_checker_rejects() {
    let env = fixture("philosophers.hkl");
    let x = to_pnml(&eval(&env, "fork")).unwrap();
    let broken = x.replace(
        "<initialMarking><text>1</text>",
        "<initialMarking><text>one</text>",
    );
    assert!(check_pnml(&broken).is_err());
    if let Some(r) = relaxng(&broken) {
        assert!(r.is_err());
    }
    let wrong_type = x.replace("grammar/ptnet", "grammar/hlpn");
    assert!(check_pnml(&wrong_type).is_err());
    if let Some(r) = relaxng(&wrong_type) {
        assert!(r.is_err());
    }
}

#[test]
fn philosophers_pnml_has_ten_transitions() {
    let env = fixture("philosophers.hkl");
    let x = to_pnml(&eval(&env, "forks_in_a_cycle")).unwrap();
    let s = check_pnml(&x).unwrap();
    assert_eq!((s.places, s.transitions, s.arcs), (15, 10, 40));
    assert_eq!(x.matches("<initialMarking>").count(), 10);
}

#[test]
fn abstract_modules_are_not_nets() {
    let env = parse(
        "alphabet { places: a }
         module m { place p label a; left: p; right: p }
         h := abstr(m)",
    )
    .unwrap();
    assert!(to_pnml(&eval(&env, "h")).is_err());
}

#[test]
fn dump_of_a_two_label_composition_round_trips() {
    let env = parse(
        "alphabet { places: beta, gamma; transitions: delta, epsilon; labels: inner }
         module a {
            place b1 label beta; place g1 label gamma; transition d1 label delta;
            place g2 label gamma; place g3 label gamma; node x label inner; node y label inner;
            arc b1 -> x; arc g1 -> x; arc x -> d1; arc x -> g2; arc y -> g3;
            left: b1, g1; right: d1, g2, g3
         }
         module b {
            place g4 label gamma; place g5 label gamma; transition e1 label epsilon;
            transition d2 label delta; node z label inner;
            arc g4 -> z; arc g5 -> z; arc e1 -> z; arc z -> d2;
            left: g4, g5, e1; right: d2
         }
         ab := a . b",
    )
    .unwrap();
    let m = eval(&env, "ab");
    let gammas = m
        .interior()
        .into_iter()
        .filter(|id| m.label(id).as_str() == "gamma" && id.atoms().len() == 2)
        .count();
    assert_eq!(gammas, 2);
    let d = dump(&m);
    let back = load(&d).unwrap();
    assert_eq!(back, m);
    assert_eq!(dump(&back), d);
}

#[test]
fn dump_matches_the_golden_file() {
    let env = fixture("philosophers.hkl");
    let d = dump(&eval(&env, "fork"));
    let golden = std::fs::read_to_string(
        std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fork.json"),
    )
    .unwrap();
    assert_eq!(d, golden);
}

#[test]
fn dot_of_fixture_modules() {
    let env = fixture("philosophers.hkl");
    let think = to_dot(&eval(&env, "think"));
    assert_eq!(think.matches("black:invis:black").count(), 2);
    let cycle = to_dot(&eval(&env, "forks_in_a_cycle"));
    assert!(!cycle.contains("subgraph left"));
    assert_eq!(cycle.matches("shape=square").count(), 10);
    assert!(fixture_path("philosophers.hkl").exists());
}
