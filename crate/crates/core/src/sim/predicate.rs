//! Marking predicates.
//!
//! ```text
//! pred := and ("||" and)*
//! and  := not ("&&" not)*
//! not  := "!" not | "(" pred ")" | "true" | "false" | sum CMP sum
//! sum  := term ("+" term)*
//! term := INT | LABEL | "\"" NODE-ID "\""
//! CMP  := "==" | "!=" | "<" | "<=" | ">" | ">="
//! ```
//!
//! A label stands for the token total over all places carrying it; a quoted
//! node id (as printed, e.g. `"available@left_use#1"`) for one place.

use std::fmt;

use crate::error::SimError;
use crate::module::NodeId;
use crate::net::NetView;

use super::Marking;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Quoted(String),
    Op(&'static str),
}

fn lex(s: &str) -> Result<Vec<Tok>, SimError> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
        if let Some(op) = ["&&", "||", "==", "!=", "<=", ">="]
            .into_iter()
            .find(|o| *o == two)
        {
            out.push(Tok::Op(op));
            i += 2;
            continue;
        }
        if let Some(op) = ["!", "<", ">", "(", ")", "+"]
            .into_iter()
            .find(|o| o.starts_with(c))
        {
            out.push(Tok::Op(op));
            i += 1;
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let end = cs[start..]
                .iter()
                .position(|&d| d == '"')
                .ok_or_else(|| SimError::Predicate("unterminated quote".into()))?;
            out.push(Tok::Quoted(cs[start..start + end].iter().collect()));
            i = start + end + 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = cs[start..i].iter().collect();
            let n = s
                .parse()
                .map_err(|_| SimError::Predicate(format!("number out of range: {s}")))?;
            out.push(Tok::Int(n));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
            continue;
        }
        return Err(SimError::Predicate(format!("unexpected character `{c}`")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cmp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Term {
    Const(u64),
    Places(String, Vec<NodeId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Expr {
    Bool(bool),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Cmp(Vec<Term>, Cmp, Vec<Term>),
}

/// A predicate compiled against one net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    src: String,
    expr: Expr,
}

struct Parser<'a> {
    toks: Vec<Tok>,
    i: usize,
    net: &'a NetView,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, SimError> {
        Err(SimError::Predicate(match self.peek() {
            Some(t) => format!("{msg} at token {}: {t:?}", self.i + 1),
            None => format!("{msg} at end of input"),
        }))
    }

    fn or(&mut self) -> Result<Expr, SimError> {
        let mut e = self.and()?;
        while self.eat_op("||") {
            e = Expr::Or(Box::new(e), Box::new(self.and()?));
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<Expr, SimError> {
        let mut e = self.not()?;
        while self.eat_op("&&") {
            e = Expr::And(Box::new(e), Box::new(self.not()?));
        }
        Ok(e)
    }

    fn not(&mut self) -> Result<Expr, SimError> {
        if self.eat_op("!") {
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        if self.eat_op("(") {
            let e = self.or()?;
            if !self.eat_op(")") {
                return self.err("expected `)`");
            }
            return Ok(e);
        }
        match self.peek() {
            Some(Tok::Ident(s)) if s == "true" || s == "false" => {
                let b = s == "true";
                self.i += 1;
                return Ok(Expr::Bool(b));
            }
            _ => {}
        }
        let lhs = self.sum()?;
        let cmp = match self.peek() {
            Some(Tok::Op("==")) => Cmp::Eq,
            Some(Tok::Op("!=")) => Cmp::Ne,
            Some(Tok::Op("<")) => Cmp::Lt,
            Some(Tok::Op("<=")) => Cmp::Le,
            Some(Tok::Op(">")) => Cmp::Gt,
            Some(Tok::Op(">=")) => Cmp::Ge,
            _ => return self.err("expected comparison"),
        };
        self.i += 1;
        let rhs = self.sum()?;
        Ok(Expr::Cmp(lhs, cmp, rhs))
    }

    fn sum(&mut self) -> Result<Vec<Term>, SimError> {
        let mut v = vec![self.term()?];
        while self.eat_op("+") {
            v.push(self.term()?);
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<Term, SimError> {
        let t = match self.peek() {
            Some(Tok::Int(n)) => Term::Const(*n),
            Some(Tok::Ident(l)) => {
                let ps: Vec<NodeId> = self
                    .net
                    .places()
                    .iter()
                    .filter(|p| self.net.label(p).as_str() == l)
                    .cloned()
                    .collect();
                if ps.is_empty() {
                    return Err(SimError::Predicate(format!("no place is labeled `{l}`")));
                }
                Term::Places(l.clone(), ps)
            }
            Some(Tok::Quoted(id)) => {
                match self.net.places().iter().find(|p| p.to_string() == *id) {
                    Some(p) => Term::Places(format!("\"{id}\""), vec![p.clone()]),
                    None => return Err(SimError::Predicate(format!("no place with id `{id}`"))),
                }
            }
            _ => return self.err("expected number, label or quoted place id"),
        };
        self.i += 1;
        Ok(t)
    }
}

fn value(terms: &[Term], m: &Marking) -> u64 {
    terms
        .iter()
        .map(|t| match t {
            Term::Const(n) => *n,
            Term::Places(_, ps) => ps.iter().map(|p| u64::from(m.get(p))).sum(),
        })
        .sum()
}

fn eval(e: &Expr, m: &Marking) -> bool {
    match e {
        Expr::Bool(b) => *b,
        Expr::Not(a) => !eval(a, m),
        Expr::And(a, b) => eval(a, m) && eval(b, m),
        Expr::Or(a, b) => eval(a, m) || eval(b, m),
        Expr::Cmp(l, c, r) => {
            let (l, r) = (value(l, m), value(r, m));
            match c {
                Cmp::Eq => l == r,
                Cmp::Ne => l != r,
                Cmp::Lt => l < r,
                Cmp::Le => l <= r,
                Cmp::Gt => l > r,
                Cmp::Ge => l >= r,
            }
        }
    }
}

impl Predicate {
    pub fn parse(src: &str, net: &NetView) -> Result<Self, SimError> {
        let mut p = Parser {
            toks: lex(src)?,
            i: 0,
            net,
        };
        let expr = p.or()?;
        if p.peek().is_some() {
            return p.err("unexpected trailing input");
        }
        Ok(Predicate {
            src: src.trim().to_owned(),
            expr,
        })
    }

    pub fn holds(&self, m: &Marking) -> bool {
        eval(&self.expr, m)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}
