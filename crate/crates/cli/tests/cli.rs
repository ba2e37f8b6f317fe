use std::path::PathBuf;
use std::process::{Command, Output};

use netmod::export::{check_pnml, load};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn netmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netmod"))
        .args(args)
        .env_remove("HERAKLIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn eval_prints_a_loadable_deterministic_dump() {
    let f = fixture("philosophers.hkl");
    let a = netmod(&["eval", &f, "fork"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let m = load(&stdout(&a)).unwrap();
    assert_eq!(m.nodes().len(), 5);
    assert_eq!(stdout(&a), stdout(&netmod(&["eval", &f, "fork"])));
}

#[test]
fn unbound_name_is_a_usage_error() {
    let o = netmod(&["eval", &fixture("philosophers.hkl"), "no_such_name"]);
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).contains("unbound name `no_such_name`"),
        "{}",
        stderr(&o)
    );
    assert!(stdout(&o).is_empty());
}

#[test]
fn parse_errors_and_bad_arguments_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.hkl");
    std::fs::write(&bad, "alphabet { places: a }\nx := y .\n").unwrap();
    let o = netmod(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("syntax error"), "{}", stderr(&o));

    assert_eq!(code(&netmod(&["frobnicate"])), 2);
    assert_eq!(code(&netmod(&["eval"])), 2);
    assert_eq!(code(&netmod(&["eval", "/nonexistent/x.hkl", "a"])), 2);
    assert_eq!(code(&netmod(&["--help"])), 0);
}

#[test]
fn iso_prints_a_witness_for_the_mirrored_fixture() {
    let o = netmod(&[
        "iso",
        &fixture("philosophers_mirrored.hkl"),
        "forks_in_a_cycle",
        "phils_in_a_cycle",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("ISOMORPHIC"));
    assert_eq!(lines.filter(|l| l.contains(" -> ")).count(), 25);
}

#[test]
fn iso_reports_non_isomorphic_cycles_as_written() {
    let o = netmod(&[
        "iso",
        &fixture("philosophers.hkl"),
        "forks_in_a_cycle",
        "phils_in_a_cycle",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "NOT-ISOMORPHIC");
}

#[test]
fn iso_with_core_renaming() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("abs.hkl");
    std::fs::write(
        &f,
        "alphabet { places: a; transitions: t }\n\
         module m { place p label a; transition x label t; arc p -> x; left: p }\n\
         n := m\n\
         one := abstr(m)\n\
         two := abstr(n)\n",
    )
    .unwrap();
    let f = f.to_str().unwrap();
    assert_eq!(code(&netmod(&["iso", f, "one", "two"])), 1);
    assert_eq!(
        code(&netmod(&["iso", f, "one", "two", "--rename-cores"])),
        0
    );
}

#[test]
fn reach_counts_the_philosopher_markings() {
    let o = netmod(&["reach", &fixture("philosophers.hkl"), "forks_in_a_cycle"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("markings: 11\n"), "{out}");
    assert!(out.contains("truncated: false\n"));
    assert!(out.contains("reversible: true\n"));
    assert!(out.contains("deadlocks: 0\n"));
}

#[test]
fn reach_on_the_verbatim_phils_cycle_hits_the_cap() {
    let o = netmod(&[
        "reach",
        &fixture("philosophers.hkl"),
        "phils_in_a_cycle",
        "--max-markings",
        "500",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("truncated: true\n"), "{}", stdout(&o));

    let o = netmod(&[
        "reach",
        &fixture("philosophers_mirrored.hkl"),
        "phils_in_a_cycle",
    ]);
    assert!(stdout(&o).contains("markings: 11\n"), "{}", stdout(&o));
}

#[test]
fn reach_checks_invariants() {
    let f = fixture("philosophers.hkl");
    let ok = netmod(&[
        "reach",
        &f,
        "forks_in_a_cycle",
        "--invariant",
        "eating <= 2 && available >= 1",
    ]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("invariant: holds"));

    let bad = netmod(&[
        "reach",
        &f,
        "forks_in_a_cycle",
        "--invariant",
        "eating == 0",
    ]);
    assert_eq!(code(&bad), 1);
    let out = stdout(&bad);
    assert!(out.contains("invariant: violated"), "{out}");
    let path = out
        .lines()
        .find(|l| l.trim_start().starts_with("path:"))
        .unwrap();
    assert_eq!(
        path.split_whitespace().count(),
        2,
        "one firing reaches a violation: {path}"
    );

    let root = netmod(&["reach", &f, "forks_in_a_cycle", "--invariant", "false"]);
    assert_eq!(code(&root), 1);
    assert!(stdout(&root).contains("path: (initial)"));

    let garbled = netmod(&["reach", &f, "forks_in_a_cycle", "--invariant", "eating <="]);
    assert_eq!(code(&garbled), 2);
}

#[test]
fn reach_rejects_modules_that_are_not_nets() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("abs.hkl");
    std::fs::write(
        &f,
        "alphabet { places: a; transitions: t }\n\
         module m { place p label a; transition x label t; arc p -> x }\n\
         h := abstr(m)\n",
    )
    .unwrap();
    let o = netmod(&["reach", f.to_str().unwrap(), "h"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("abstract"), "{}", stderr(&o));
}

#[test]
fn factorize_recomposes() {
    let o = netmod(&[
        "factorize",
        &fixture("production.hkl"),
        "production_and_pack",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("atom ")).count(), 2);
    assert!(out.ends_with("recomposition: isomorphic\n"));
}

#[test]
fn check_reports_each_binding() {
    let o = netmod(&["check", &fixture("production.hkl")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.hkl");
    std::fs::write(&f, "fine := E\nbroken := abstr(E . E)\n").unwrap();
    let o = netmod(&["check", f.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("ok   definition fine"));
    assert!(
        out.contains("FAIL definition broken: module has no name"),
        "{out}"
    );
}

#[test]
fn writes_dot_pnml_and_dump_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("philosophers.hkl");
    let p = |n: &str| dir.path().join(n).to_string_lossy().into_owned();

    assert_eq!(
        code(&netmod(&["render", &f, "fork", "--dot", &p("fork.dot")])),
        0
    );
    let dot = std::fs::read_to_string(p("fork.dot")).unwrap();
    assert!(dot.starts_with("digraph"), "{dot}");

    assert_eq!(
        code(&netmod(&[
            "export-pnml",
            &f,
            "forks_in_a_cycle",
            &p("c.pnml")
        ])),
        0
    );
    let s = check_pnml(&std::fs::read_to_string(p("c.pnml")).unwrap()).unwrap();
    assert_eq!((s.places, s.transitions, s.arcs), (15, 10, 40));

    assert_eq!(code(&netmod(&["dump", &f, "fork", &p("fork.json")])), 0);
    let eval = stdout(&netmod(&["eval", &f, "fork"]));
    assert_eq!(std::fs::read_to_string(p("fork.json")).unwrap(), eval);
}

#[test]
fn pnml_export_of_an_abstract_module_fails() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("abs.hkl");
    std::fs::write(
        &f,
        "alphabet { places: a; transitions: t }\n\
         module m { place p label a; transition x label t; arc p -> x }\n\
         h := abstr(m)\n",
    )
    .unwrap();
    let out = dir.path().join("h.pnml");
    let o = netmod(&[
        "export-pnml",
        f.to_str().unwrap(),
        "h",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

fn without_timings(s: &str) -> String {
    s.lines()
        .map(|l| l.split(" cases in ").next().unwrap())
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn selftest_seed_comes_from_flag_or_environment() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_netmod"));
        c.arg("selftest").args(["--cases", "10"]).args(args);
        match env {
            Some(v) => c.env("HERAKLIT_SEED", v),
            None => c.env_remove("HERAKLIT_SEED"),
        };
        c.output().unwrap()
    };
    let default = run(None, &[]);
    assert_eq!(code(&default), 0, "{}", stdout(&default));
    assert!(stdout(&default).starts_with("seed: 42\n"));
    assert_eq!(
        stdout(&default)
            .lines()
            .filter(|l| l.starts_with("PASS "))
            .count(),
        5
    );

    let from_env = run(Some("7"), &[]);
    assert!(stdout(&from_env).starts_with("seed: 7\n"));
    let from_flag = run(None, &["--seed", "7"]);
    assert_eq!(
        without_timings(&stdout(&from_env)),
        without_timings(&stdout(&from_flag))
    );

    assert_eq!(code(&run(Some("not-a-number"), &[])), 2);
}
