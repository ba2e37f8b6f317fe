//! `netmod` command line.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use netmod::dsl::{eval_binding, Binding};
use netmod::export::{dump, to_dot, to_pnml};
use netmod::random::{selftest, SelftestCounts};
use netmod::sim::{check_invariant, reachability, Marking, Predicate, ReachCaps};
use netmod::{
    check_interfaces_well_formed, factorize, isomorphic, parse, validate_net, Environment,
    IsoOptions, Module, NodeId,
};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "netmod",
    version,
    about = "Compose, compare and analyze modular Petri nets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a binding and print its canonical dump.
    Eval { file: PathBuf, name: String },
    /// Write a Graphviz rendering of a binding.
    Render {
        file: PathBuf,
        name: String,
        #[arg(long, value_name = "OUT")]
        dot: PathBuf,
    },
    /// Write a binding as a PNML place/transition net.
    ExportPnml {
        file: PathBuf,
        name: String,
        out: PathBuf,
    },
    /// Write the canonical dump of a binding to a file.
    Dump {
        file: PathBuf,
        name: String,
        out: PathBuf,
    },
    /// Decide whether two bindings are isomorphic.
    Iso {
        file: PathBuf,
        name1: String,
        name2: String,
        /// Match abstract nodes up to a renaming of their labels.
        #[arg(long)]
        rename_cores: bool,
    },
    /// Split a net into transition atoms and recompose them.
    Factorize { file: PathBuf, name: String },
    /// Explore the reachable markings of a net.
    Reach {
        file: PathBuf,
        name: String,
        #[arg(long, default_value_t = ReachCaps::default().max_markings)]
        max_markings: usize,
        #[arg(long, default_value_t = ReachCaps::default().max_tokens_per_place)]
        max_tokens: u32,
        /// Predicate that must hold in every reachable marking,
        /// e.g. `eating <= 2 && available + eating >= 3`.
        #[arg(long, value_name = "EXPR")]
        invariant: Option<String>,
        /// Print every reachable marking.
        #[arg(long)]
        list: bool,
    },
    /// Evaluate every binding and check interface well-formedness.
    Check { file: PathBuf },
    /// Run the algebraic laws on generated modules.
    Selftest {
        #[arg(long, env = "HERAKLIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Use this many cases for every law instead of the defaults.
        #[arg(long)]
        cases: Option<usize>,
    },
}

macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

macro_rules! out {
    ($out:expr, $($arg:tt)*) => {{
        let _ = write!($out, $($arg)*);
    }};
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let status = run(cli.command, &mut out);
    let _ = io::stdout().lock().write_all(out.as_bytes());
    match status {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_env(file: &Path) -> Result<Environment> {
    let src = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    parse(&src).with_context(|| format!("parsing {}", file.display()))
}

fn load(file: &Path, name: &str) -> Result<Module> {
    let env = load_env(file)?;
    eval_binding(&env, name).with_context(|| format!("evaluating `{name}`"))
}

fn write(out: &Path, text: &str) -> Result<()> {
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))
}

fn run(cmd: Command, out: &mut String) -> Result<Status> {
    match cmd {
        Command::Eval { file, name } => {
            out!(out, "{}", dump(&load(&file, &name)?));
        }
        Command::Render { file, name, dot } => {
            write(&dot, &to_dot(&load(&file, &name)?))?;
        }
        Command::ExportPnml { file, name, out } => {
            let m = load(&file, &name)?;
            write(
                &out,
                &to_pnml(&m).with_context(|| format!("exporting `{name}`"))?,
            )?;
        }
        Command::Dump { file, name, out } => {
            write(&out, &dump(&load(&file, &name)?))?;
        }
        Command::Iso {
            file,
            name1,
            name2,
            rename_cores,
        } => {
            let env = load_env(&file)?;
            let a = eval_binding(&env, &name1).with_context(|| format!("evaluating `{name1}`"))?;
            let b = eval_binding(&env, &name2).with_context(|| format!("evaluating `{name2}`"))?;
            let opts = if rename_cores {
                IsoOptions::renaming()
            } else {
                IsoOptions::default()
            };
            match isomorphic(&a, &b, &opts) {
                Ok(Some(w)) => {
                    outln!(out, "ISOMORPHIC");
                    for (x, y) in &w.mapping {
                        outln!(out, "{x} -> {y}");
                    }
                }
                Ok(None) => {
                    outln!(out, "NOT-ISOMORPHIC");
                    return Ok(Status::Failed);
                }
                Err(e) => {
                    outln!(out, "UNDECIDED: {e}");
                    return Ok(Status::Failed);
                }
            }
        }
        Command::Factorize { file, name } => {
            let net = validate_net(&load(&file, &name)?)?;
            let f = factorize(&net)?;
            for (i, atom) in f.atoms.iter().enumerate() {
                outln!(out, "atom {}: {}", i + 1, describe_atom(atom));
            }
            outln!(
                out,
                "recomposition: {}",
                if f.matches { "isomorphic" } else { "differs" }
            );
            if !f.matches {
                return Ok(Status::Failed);
            }
        }
        Command::Reach {
            file,
            name,
            max_markings,
            max_tokens,
            invariant,
            list,
        } => return reach(&file, &name, max_markings, max_tokens, invariant, list, out),
        Command::Check { file } => return check(&file, out),
        Command::Selftest { seed, cases } => {
            let counts = match cases {
                Some(n) => SelftestCounts {
                    associativity: n,
                    identity: n,
                    idempotence: n,
                    abstraction: n,
                    completeness: n,
                },
                None => SelftestCounts::default(),
            };
            outln!(out, "seed: {seed}");
            let mut ok = true;
            for r in selftest(seed, counts) {
                ok &= r.passed();
                outln!(
                    out,
                    "{} {}: {}/{} cases in {:.2?}",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.law,
                    r.cases - r.failures,
                    r.cases,
                    r.elapsed
                );
                if let Some(f) = r.first_failure {
                    outln!(out, "  first failure: {f}");
                }
            }
            if !ok {
                return Ok(Status::Failed);
            }
        }
    }
    Ok(Status::Ok)
}

fn describe_atom(m: &Module) -> String {
    let labels = |ids: Vec<&NodeId>| {
        ids.iter()
            .map(|p| m.label(p).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let t = m.interior().into_iter().next();
    match t {
        Some(t) => {
            let pre = m
                .edges()
                .iter()
                .filter(|(_, b)| b == t)
                .map(|(a, _)| a)
                .collect();
            let post = m
                .edges()
                .iter()
                .filter(|(a, _)| a == t)
                .map(|(_, b)| b)
                .collect();
            format!(
                "{}: {{{}}} -> {{{}}}",
                m.label(t),
                labels(pre),
                labels(post)
            )
        }
        None => "(empty atom)".to_string(),
    }
}

fn reach(
    file: &Path,
    name: &str,
    max_markings: usize,
    max_tokens: u32,
    invariant: Option<String>,
    list: bool,
    out: &mut String,
) -> Result<Status> {
    let net = validate_net(&load(file, name)?)?;
    let pred = invariant
        .map(|src| Predicate::parse(&src, &net))
        .transpose()?;
    let caps = ReachCaps {
        max_markings,
        max_tokens_per_place: max_tokens,
    };
    let g = reachability(&net, &Marking::initial(&net), caps)?;
    outln!(out, "markings: {}", g.len());
    outln!(out, "arcs: {}", g.arc_count());
    outln!(out, "truncated: {}", g.truncated);
    outln!(out, "deadlocks: {}", g.deadlocks().len());
    if !g.truncated {
        outln!(out, "reversible: {}", g.is_reversible());
    }
    if list {
        for (i, m) in g.markings().enumerate() {
            outln!(out, "  {i}: {m}");
        }
    }
    let Some(p) = pred else {
        return Ok(Status::Ok);
    };
    match check_invariant(&g, |m| p.holds(m)) {
        None if g.truncated => outln!(out, "invariant: holds on the explored part ({p})"),
        None => outln!(out, "invariant: holds ({p})"),
        Some(c) => {
            outln!(out, "invariant: violated ({p})");
            outln!(out, "  marking: {}", c.marking);
            let path: Vec<String> = c.path.iter().map(|t| t.to_string()).collect();
            outln!(
                out,
                "  path: {}",
                if path.is_empty() {
                    "(initial)".into()
                } else {
                    path.join(" ")
                }
            );
            return Ok(Status::Failed);
        }
    }
    Ok(Status::Ok)
}

fn check(file: &Path, out: &mut String) -> Result<Status> {
    let env = load_env(file)?;
    let mut failed = 0;
    for (name, b) in env.bindings() {
        let kind = match b {
            Binding::Snippet(_) => "module",
            Binding::Definition(_) => "definition",
        };
        let res = eval_binding(&env, name)
            .map_err(anyhow::Error::from)
            .and_then(|m| {
                m.validate()?;
                check_interfaces_well_formed(&m)?;
                m.check_alphabet(&env.alphabet)?;
                Ok(m)
            });
        match res {
            Ok(m) => outln!(
                out,
                "ok   {kind} {name}: {} nodes, {} edges, left {}, right {}",
                m.nodes().len(),
                m.edges().len(),
                m.left().len(),
                m.right().len()
            ),
            Err(e) => {
                failed += 1;
                outln!(out, "FAIL {kind} {name}: {e:#}");
            }
        }
    }
    outln!(out, "{} bindings, {failed} failed", env.len());
    Ok(if failed == 0 {
        Status::Ok
    } else {
        Status::Failed
    })
}
