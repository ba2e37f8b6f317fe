use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{lex, Pos, Tok};
use super::{Binding, DslError, Environment, ModuleExpr, NodeDecl, SnippetDecl};
use crate::module::{Label, NodeKind};

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        let p = self.pos();
        Err(DslError::Syntax {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".into(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), DslError> {
        if self.peek() == Some(&t) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.found()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let out = (s.clone(), self.pos());
                self.i += 1;
                Ok(out)
            }
            _ => self.err(format!("expected identifier, found {}", self.found())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.i += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`, found {}", self.found())),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn ident_list(&mut self) -> Result<Vec<(String, Pos)>, DslError> {
        let mut out = Vec::new();
        if !matches!(self.peek(), Some(Tok::Ident(_))) {
            return Ok(out);
        }
        out.push(self.ident()?);
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }
}

const RESERVED: &[&str] = &["alphabet", "module", "abstr", "E"];

#[derive(Default)]
struct AlphabetDecl {
    places: Vec<(String, Pos)>,
    transitions: Vec<(String, Pos)>,
    labels: Vec<(String, Pos)>,
}

fn parse_alphabet(p: &mut Parser, into: &mut AlphabetDecl) -> Result<(), DslError> {
    p.expect(Tok::LBrace)?;
    loop {
        if p.eat(&Tok::RBrace) {
            return Ok(());
        }
        let (section, spos) = p.ident()?;
        let target = match section.as_str() {
            "places" => &mut into.places,
            "transitions" => &mut into.transitions,
            "labels" => &mut into.labels,
            other => {
                return Err(DslError::Syntax {
                    line: spos.line,
                    col: spos.col,
                    msg: format!(
                        "unknown alphabet section `{other}`; expected places, transitions or labels"
                    ),
                })
            }
        };
        p.expect(Tok::Colon)?;
        target.extend(p.ident_list()?);
        if !p.eat(&Tok::Semi) {
            p.expect(Tok::RBrace)?;
            return Ok(());
        }
    }
}

fn parse_snippet(p: &mut Parser, name: String) -> Result<SnippetDecl, DslError> {
    p.expect(Tok::LBrace)?;
    let mut decl = SnippetDecl {
        name,
        nodes: Vec::new(),
        arcs: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
    };
    let mut arc_pos = Vec::new();
    let mut iface_pos = Vec::new();
    let mut node_names = BTreeSet::new();
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        let pos = p.pos();
        let (kw, _) = p.ident()?;
        match kw.as_str() {
            "place" | "transition" | "node" => {
                let (n, npos) = p.ident()?;
                p.keyword("label")?;
                let (l, _) = p.ident()?;
                let mut marking = 0;
                if matches!(p.peek(), Some(Tok::Ident(s)) if s == "marking") {
                    if kw != "place" {
                        return p.err("only places carry a marking");
                    }
                    p.i += 1;
                    match p.peek() {
                        Some(Tok::Int(k)) => {
                            marking = *k;
                            p.i += 1;
                        }
                        _ => return p.err(format!("expected token count, found {}", p.found())),
                    }
                }
                if !node_names.insert(n.clone()) {
                    return Err(DslError::DuplicateName { name: n, pos: npos });
                }
                let kind = match kw.as_str() {
                    "place" => NodeKind::Place,
                    "transition" => NodeKind::Transition,
                    _ => NodeKind::Abstract,
                };
                decl.nodes.push(NodeDecl {
                    name: n,
                    kind,
                    label: Label::new(l),
                    marking,
                    pos,
                });
            }
            "arc" => {
                let (a, apos) = p.ident()?;
                p.expect(Tok::Arrow)?;
                let (b, bpos) = p.ident()?;
                arc_pos.push((apos, bpos));
                decl.arcs.push((a, b));
            }
            "left" | "right" => {
                p.expect(Tok::Colon)?;
                let items = p.ident_list()?;
                let target = if kw == "left" {
                    &mut decl.left
                } else {
                    &mut decl.right
                };
                for (n, npos) in items {
                    if target.contains(&n) {
                        return Err(DslError::DuplicateName { name: n, pos: npos });
                    }
                    iface_pos.push((n.clone(), npos));
                    target.push(n);
                }
            }
            other => {
                return Err(DslError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    msg: format!(
                        "unknown statement `{other}`; expected place, transition, node, arc, left or right"
                    ),
                })
            }
        }
        if !p.eat(&Tok::Semi) {
            p.expect(Tok::RBrace)?;
            break;
        }
    }
    for ((a, b), (apos, bpos)) in decl.arcs.iter().zip(&arc_pos) {
        for (n, pos) in [(a, apos), (b, bpos)] {
            if !node_names.contains(n) {
                return Err(DslError::UndeclaredNode {
                    name: n.clone(),
                    pos: *pos,
                });
            }
        }
    }
    for (n, pos) in &iface_pos {
        if !node_names.contains(n) {
            return Err(DslError::UndeclaredNode {
                name: n.clone(),
                pos: *pos,
            });
        }
    }
    Ok(decl)
}

fn parse_expr(p: &mut Parser) -> Result<ModuleExpr, DslError> {
    let mut e = parse_postfix(p)?;
    while p.eat(&Tok::Dot) {
        let rhs = parse_postfix(p)?;
        e = ModuleExpr::compose(e, rhs);
    }
    Ok(e)
}

fn parse_postfix(p: &mut Parser) -> Result<ModuleExpr, DslError> {
    let mut e = parse_primary(p)?;
    while p.peek() == Some(&Tok::Caret) {
        p.i += 1;
        p.keyword("c")?;
        e = ModuleExpr::closure(e);
    }
    Ok(e)
}

fn parse_primary(p: &mut Parser) -> Result<ModuleExpr, DslError> {
    match p.peek() {
        Some(Tok::LParen) => {
            p.i += 1;
            let e = parse_expr(p)?;
            p.expect(Tok::RParen)?;
            Ok(e)
        }
        Some(Tok::Ident(s)) if s == "E" => {
            p.i += 1;
            Ok(ModuleExpr::Empty)
        }
        Some(Tok::Ident(s)) if s == "abstr" => {
            p.i += 1;
            p.expect(Tok::LParen)?;
            let e = parse_expr(p)?;
            p.expect(Tok::RParen)?;
            Ok(ModuleExpr::abstr(e))
        }
        Some(Tok::Ident(s)) if RESERVED.contains(&s.as_str()) => {
            p.err(format!("`{s}` cannot be used as a module name"))
        }
        Some(Tok::Ident(_)) => Ok(ModuleExpr::Ref(p.ident()?.0)),
        _ => p.err(format!("expected module expression, found {}", p.found())),
    }
}

/// Parses a `.hkl` source into an environment.
pub fn parse(src: &str) -> Result<Environment, DslError> {
    let toks = lex(src)?;
    let end = Pos {
        line: src.lines().count().max(1),
        col: src.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    let mut p = Parser { toks, i: 0, end };
    let mut env = Environment::default();
    let mut alpha = AlphabetDecl::default();
    let mut name_pos: BTreeMap<String, Pos> = BTreeMap::new();

    while p.peek().is_some() {
        let pos = p.pos();
        let (word, _) = p.ident()?;
        let (name, binding) = match word.as_str() {
            "alphabet" => {
                parse_alphabet(&mut p, &mut alpha)?;
                p.eat(&Tok::Semi);
                continue;
            }
            "module" => {
                let (name, _) = p.ident()?;
                if RESERVED.contains(&name.as_str()) {
                    return p.err(format!("`{name}` is reserved"));
                }
                let s = parse_snippet(&mut p, name.clone())?;
                (name, Binding::Snippet(s))
            }
            _ if RESERVED.contains(&word.as_str()) => {
                return Err(DslError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    msg: format!("`{word}` is reserved"),
                })
            }
            _ => {
                p.expect(Tok::Define)?;
                let e = parse_expr(&mut p)?;
                p.eat(&Tok::Semi);
                (word, Binding::Definition(e))
            }
        };
        if name_pos.contains_key(&name) {
            return Err(DslError::DuplicateName { name, pos });
        }
        name_pos.insert(name.clone(), pos);
        env.bindings.insert(name, binding);
    }

    for (l, _) in &alpha.places {
        env.alphabet.add_place(l.as_str())?;
    }
    for (l, _) in &alpha.transitions {
        env.alphabet.add_transition(l.as_str())?;
    }
    for (l, _) in &alpha.labels {
        env.alphabet.add_label(l.as_str());
    }

    for s in env.snippets() {
        for n in &s.nodes {
            match env.alphabet.kind_of(&n.label) {
                None => {
                    return Err(DslError::UnknownLabel {
                        label: n.label.to_string(),
                        pos: n.pos,
                    })
                }
                Some(k) if k != n.kind => {
                    return Err(DslError::LabelKindMismatch {
                        label: n.label.to_string(),
                        kind: n.kind,
                        pos: n.pos,
                    })
                }
                _ => {}
            }
        }
    }
    check_acyclic(&env)?;
    Ok(env)
}

fn check_acyclic(env: &Environment) -> Result<(), DslError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        env: &'a Environment,
        name: &'a str,
        marks: &mut BTreeMap<&'a str, Mark>,
    ) -> Result<(), DslError> {
        match marks.get(name) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Open) => return Err(DslError::RecursiveDefinition(name.to_owned())),
            None => {}
        }
        if let Some(Binding::Definition(e)) = env.get(name) {
            marks.insert(name, Mark::Open);
            for r in e.refs() {
                visit(env, r, marks)?;
            }
        }
        marks.insert(name, Mark::Done);
        Ok(())
    }
    let mut marks = BTreeMap::new();
    for (name, _) in env.definitions() {
        visit(env, name, &mut marks)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "
        alphabet { places: a; transitions: t }
        module m { place p label a marking 2; transition x label t; arc p -> x; left: p; right: x }
        n := m . m ^c
        k := abstr(n) . E;
    ";

    #[test]
    fn parses_snippets_and_definitions() {
        let env = parse(SMALL).unwrap();
        assert_eq!(env.len(), 3);
        let Some(Binding::Snippet(m)) = env.get("m") else {
            panic!()
        };
        assert_eq!(m.nodes[0].marking, 2);
        assert_eq!(m.left, vec!["p".to_string()]);
        assert_eq!(
            env.get("n"),
            Some(&Binding::Definition(ModuleExpr::compose(
                ModuleExpr::name("m"),
                ModuleExpr::closure(ModuleExpr::name("m"))
            )))
        );
        assert_eq!(
            env.get("k"),
            Some(&Binding::Definition(ModuleExpr::compose(
                ModuleExpr::abstr(ModuleExpr::name("n")),
                ModuleExpr::Empty
            )))
        );
    }

    #[test]
    fn compose_is_left_associated() {
        let env = parse("x := a . b • c").unwrap();
        assert_eq!(
            env.get("x"),
            Some(&Binding::Definition(ModuleExpr::chain([
                ModuleExpr::name("a"),
                ModuleExpr::name("b"),
                ModuleExpr::name("c")
            ])))
        );
    }

    #[test]
    fn alphabet_only_file_has_no_bindings() {
        let env = parse("alphabet { places: a, b; transitions: t }").unwrap();
        assert!(env.is_empty());
        assert_eq!(env.alphabet.labels().count(), 3);
    }

    #[test]
    fn recursion_is_rejected() {
        assert_eq!(
            parse("x := x . x"),
            Err(DslError::RecursiveDefinition("x".into()))
        );
        assert!(matches!(
            parse("x := y\ny := abstr(x)"),
            Err(DslError::RecursiveDefinition(_))
        ));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        assert!(matches!(
            parse("x := E\nx := E"),
            Err(DslError::DuplicateName {
                pos: Pos { line: 2, col: 1 },
                ..
            })
        ));
        assert!(matches!(
            parse("alphabet { places: a } module m { place p label a; place p label a }"),
            Err(DslError::DuplicateName { .. })
        ));
    }

    #[test]
    fn labels_must_be_declared_with_the_right_kind() {
        assert!(matches!(
            parse("alphabet { places: a } module m { place p label b }"),
            Err(DslError::UnknownLabel { .. })
        ));
        assert!(matches!(
            parse("alphabet { places: a } module m { transition p label a }"),
            Err(DslError::LabelKindMismatch { .. })
        ));
    }

    #[test]
    fn arcs_to_undeclared_nodes_are_rejected() {
        assert!(matches!(
            parse("alphabet { places: a } module m { place p label a; arc p -> q }"),
            Err(DslError::UndeclaredNode { name, .. }) if name == "q"
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("x := a .\n") {
            Err(DslError::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse("x := (a . b\ny := c") {
            Err(DslError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 1)),
            other => panic!("{other:?}"),
        }
        assert!(parse("E := a").is_err());
    }

    #[test]
    fn display_round_trips() {
        let env = parse("x := (a . (b . c))^c . abstr(d) . E").unwrap();
        let Some(Binding::Definition(e)) = env.get("x") else {
            panic!()
        };
        let again = parse(&format!("x := {e}")).unwrap();
        assert_eq!(again.get("x"), env.get("x"));
    }
}
