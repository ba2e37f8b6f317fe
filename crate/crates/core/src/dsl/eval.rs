use std::collections::{BTreeMap, BTreeSet};

use super::{Binding, DslError, Environment, ModuleExpr, SnippetDecl};
use crate::calculus::{abstract_of, closure, compose, empty_module};
use crate::module::{Interface, Module, Node, NodeId};

/// Builds a module from a snippet, with every node id tagged by `tag`.
pub fn instantiate(decl: &SnippetDecl, tag: &str) -> Result<Module, DslError> {
    let id = |n: &str| NodeId::atom(tag, n);
    let nodes: BTreeMap<NodeId, Node> = decl
        .nodes
        .iter()
        .map(|n| (id(&n.name), Node::new(n.label.clone(), n.kind)))
        .collect();
    let edges: BTreeSet<(NodeId, NodeId)> = decl.arcs.iter().map(|(a, b)| (id(a), id(b))).collect();
    let marking = decl
        .nodes
        .iter()
        .map(|n| (id(&n.name), n.marking))
        .collect();
    let left = Interface::new(decl.left.iter().map(|n| id(n)).collect());
    let right = Interface::new(decl.right.iter().map(|n| id(n)).collect());
    Ok(Module::new(nodes, edges, left, right, marking)?.with_name(decl.name.clone()))
}

/// Evaluates expressions against an environment. Each name reference gets
/// a fresh instance tag, so repeated references never share nodes.
pub struct Evaluator<'e> {
    env: &'e Environment,
    counter: u64,
}

impl<'e> Evaluator<'e> {
    pub fn new(env: &'e Environment) -> Self {
        Evaluator { env, counter: 0 }
    }

    fn fresh(&mut self, name: &str) -> String {
        self.counter += 1;
        format!("{name}#{}", self.counter)
    }

    pub fn eval_name(&mut self, name: &str) -> Result<Module, DslError> {
        match self.env.get(name) {
            None => Err(DslError::UnboundName(name.to_owned())),
            Some(Binding::Snippet(s)) => {
                let tag = self.fresh(name);
                instantiate(s, &tag)
            }
            Some(Binding::Definition(e)) => Ok(self.eval(e)?.with_name(name)),
        }
    }

    pub fn eval(&mut self, expr: &ModuleExpr) -> Result<Module, DslError> {
        Ok(match expr {
            ModuleExpr::Ref(n) => self.eval_name(n)?,
            ModuleExpr::Empty => empty_module(),
            ModuleExpr::Compose(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                compose(&a, &b)?
            }
            ModuleExpr::Closure(a) => closure(&self.eval(a)?),
            ModuleExpr::Abstr(a) => abstract_of(&self.eval(a)?)?,
        })
    }
}

/// Evaluates `expr` with a fresh evaluator.
pub fn eval(env: &Environment, expr: &ModuleExpr) -> Result<Module, DslError> {
    Evaluator::new(env).eval(expr)
}

/// Evaluates the binding called `name`.
pub fn eval_binding(env: &Environment, name: &str) -> Result<Module, DslError> {
    Evaluator::new(env).eval_name(name)
}
