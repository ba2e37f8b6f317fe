//! Textual module algebra.
//!
//! A `.hkl` file declares an alphabet, snippet modules, and definitions built
//! from the operators `.` (or `•`), postfix `^c`, `abstr(...)` and `E`:
//!
//! ```text
//! alphabet { places: available; transitions: take, return }
//! module left_use {
//!     transition take label take; transition ret label return;
//!     place avail label available marking 1;
//!     arc avail -> take; arc ret -> avail;
//!     left: take, ret; right: avail
//! }
//! fork := left_use . right_use
//! ```
//!
//! Every reference to a name instantiates a fresh copy, so `N . N`
//! composes two disjoint copies of `N`.

mod eval;
mod lexer;
mod parser;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::error::CalcError;
use crate::module::{Alphabet, Label, NodeKind};

pub use eval::{eval, eval_binding, instantiate, Evaluator};
pub use lexer::Pos;
pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{}:{}: duplicate name `{name}`", pos.line, pos.col)]
    DuplicateName { name: String, pos: Pos },
    #[error("{}:{}: unknown label `{label}`", pos.line, pos.col)]
    UnknownLabel { label: String, pos: Pos },
    #[error("{}:{}: label `{label}` is not a {kind} label", pos.line, pos.col)]
    LabelKindMismatch {
        label: String,
        kind: NodeKind,
        pos: Pos,
    },
    #[error("{}:{}: undeclared node `{name}`", pos.line, pos.col)]
    UndeclaredNode { name: String, pos: Pos },
    #[error("recursive definition of `{0}`")]
    RecursiveDefinition(String),
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

/// Algebraic expression over module names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleExpr {
    Ref(String),
    Compose(Box<ModuleExpr>, Box<ModuleExpr>),
    Closure(Box<ModuleExpr>),
    Abstr(Box<ModuleExpr>),
    Empty,
}

impl ModuleExpr {
    pub fn name(s: &str) -> Self {
        ModuleExpr::Ref(s.to_owned())
    }

    pub fn compose(a: ModuleExpr, b: ModuleExpr) -> Self {
        ModuleExpr::Compose(Box::new(a), Box::new(b))
    }

    /// Left-associated composition of a chain.
    pub fn chain(items: impl IntoIterator<Item = ModuleExpr>) -> Self {
        let mut it = items.into_iter();
        let first = it.next().unwrap_or(ModuleExpr::Empty);
        it.fold(first, ModuleExpr::compose)
    }

    pub fn closure(a: ModuleExpr) -> Self {
        ModuleExpr::Closure(Box::new(a))
    }

    pub fn abstr(a: ModuleExpr) -> Self {
        ModuleExpr::Abstr(Box::new(a))
    }

    /// Names referenced by this expression.
    pub fn refs(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ModuleExpr::Ref(n) => out.push(n),
            ModuleExpr::Compose(a, b) => {
                a.collect_refs(out);
                b.collect_refs(out);
            }
            ModuleExpr::Closure(a) | ModuleExpr::Abstr(a) => a.collect_refs(out),
            ModuleExpr::Empty => {}
        }
    }
}

impl fmt::Display for ModuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleExpr::Ref(n) => f.write_str(n),
            ModuleExpr::Empty => f.write_str("E"),
            ModuleExpr::Compose(a, b) => match **b {
                ModuleExpr::Compose(..) => write!(f, "{a} . ({b})"),
                _ => write!(f, "{a} . {b}"),
            },
            ModuleExpr::Closure(a) => match **a {
                ModuleExpr::Compose(..) => write!(f, "({a})^c"),
                _ => write!(f, "{a}^c"),
            },
            ModuleExpr::Abstr(a) => write!(f, "abstr({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeDecl {
    pub name: String,
    pub kind: NodeKind,
    pub label: Label,
    pub marking: u32,
    pub pos: Pos,
}

/// A snippet: nodes, arcs and the two interfaces in top-down index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnippetDecl {
    pub name: String,
    pub nodes: Vec<NodeDecl>,
    pub arcs: Vec<(String, String)>,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Snippet(SnippetDecl),
    Definition(ModuleExpr),
}

/// Parsed file: alphabet plus bindings in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    pub alphabet: Alphabet,
    bindings: IndexMap<String, Binding>,
}

impl Environment {
    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &Binding)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn snippets(&self) -> impl Iterator<Item = &SnippetDecl> {
        self.bindings.values().filter_map(|b| match b {
            Binding::Snippet(s) => Some(s),
            _ => None,
        })
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&str, &ModuleExpr)> {
        self.bindings.iter().filter_map(|(k, b)| match b {
            Binding::Definition(e) => Some((k.as_str(), e)),
            _ => None,
        })
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}
