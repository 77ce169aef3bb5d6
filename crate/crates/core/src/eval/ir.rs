//! Resolution of named formulas into slot-indexed nodes.

use std::collections::HashMap;

use super::{Assignment, EvalError};
use crate::logic::{Arg, FixKind, Formula};
use crate::semiring::{Semiring, Value};
use crate::structures::{Relation, Structure};

#[derive(Clone, Copy, Debug)]
pub(crate) enum VarRef {
    Slot(usize),
    Elem(usize),
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Bool(bool),
    Eq(VarRef, VarRef),
    Less(VarRef, VarRef),
    Rel(usize, Vec<VarRef>),
    So(usize, Vec<VarRef>),
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
    And(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
    ExistsSo(usize, usize, Box<Node>),
    Closure { det: bool, from: Vec<usize>, to: Vec<usize>, body: Box<Node>, args: Vec<VarRef> },
    Fix { kind: FixKind, rel: usize, vars: Vec<usize>, body: Box<Node>, args: Vec<VarRef> },
    Const(Value),
    OPlus(Box<Node>, Box<Node>),
    OTimes(Box<Node>, Box<Node>),
    SumFo(usize, Box<Node>),
    ProdFo(usize, Box<Node>),
    SumSo(usize, usize, Box<Node>),
    ProdSo(usize, usize, Box<Node>),
    /// A run of nested `sum X:k.` with the Boolean conjuncts of the body
    /// split out. `checks[i]` holds the conjuncts whose chain variables are
    /// all among the first `i` ones; `body` is the remaining factors.
    SumSoChain { vars: Vec<(usize, usize)>, checks: Vec<Vec<Node>>, body: Box<Node> },
    Guard(Box<Node>, Box<Node>),
}

/// Slot tables produced alongside the nodes.
pub(crate) struct Env {
    pub fo: Vec<Option<usize>>,
    pub so: Vec<Option<Relation>>,
}

pub(crate) struct Compiler<'a> {
    structure: &'a Structure,
    semiring: &'a Semiring,
    assignment: &'a Assignment,
    prune: bool,
    fo_scope: Vec<(String, usize)>,
    so_scope: Vec<(String, usize)>,
    fo_free: HashMap<String, usize>,
    so_free: HashMap<String, usize>,
    fo_slots: usize,
    so_slots: usize,
}

impl<'a> Compiler<'a> {
    pub fn new(structure: &'a Structure, semiring: &'a Semiring, assignment: &'a Assignment, prune: bool) -> Self {
        Compiler {
            structure,
            semiring,
            assignment,
            prune,
            fo_scope: Vec::new(),
            so_scope: Vec::new(),
            fo_free: HashMap::new(),
            so_free: HashMap::new(),
            fo_slots: 0,
            so_slots: 0,
        }
    }

    /// Initial environment: free variables take their assigned values.
    pub fn env(&self) -> Env {
        let mut fo = vec![None; self.fo_slots];
        for (name, &slot) in &self.fo_free {
            fo[slot] = self.assignment.fo.get(name).copied();
        }
        let mut so = vec![None; self.so_slots];
        for (name, &slot) in &self.so_free {
            so[slot] = self.assignment.so.get(name).cloned();
        }
        Env { fo, so }
    }

    fn fo_ref(&mut self, name: &str) -> usize {
        if let Some((_, s)) = self.fo_scope.iter().rev().find(|(n, _)| n == name) {
            return *s;
        }
        if let Some(&s) = self.fo_free.get(name) {
            return s;
        }
        let s = self.fo_slots;
        self.fo_slots += 1;
        self.fo_free.insert(name.to_string(), s);
        s
    }

    fn so_ref(&mut self, name: &str) -> usize {
        if let Some((_, s)) = self.so_scope.iter().rev().find(|(n, _)| n == name) {
            return *s;
        }
        if let Some(&s) = self.so_free.get(name) {
            return s;
        }
        let s = self.so_slots;
        self.so_slots += 1;
        self.so_free.insert(name.to_string(), s);
        s
    }

    fn bind_fo(&mut self, name: &str) -> usize {
        let s = self.fo_slots;
        self.fo_slots += 1;
        self.fo_scope.push((name.to_string(), s));
        s
    }

    fn bind_so(&mut self, name: &str) -> usize {
        let s = self.so_slots;
        self.so_slots += 1;
        self.so_scope.push((name.to_string(), s));
        s
    }

    fn var(&mut self, name: &str) -> VarRef {
        VarRef::Slot(self.fo_ref(name))
    }

    fn arg(&mut self, a: &Arg) -> VarRef {
        match a {
            Arg::Var(v) => self.var(v),
            Arg::Elem(e) => VarRef::Elem(*e),
        }
    }

    fn rel_index(&self, name: &str, arity: usize) -> Result<usize, EvalError> {
        let sig = self.structure.signature();
        let idx = sig.index_of(name).ok_or_else(|| EvalError::UnknownSymbol(name.to_string()))?;
        let expected = sig.arity(name).expect("indexed symbol");
        if expected != arity {
            return Err(EvalError::Arity { name: name.to_string(), expected, found: arity });
        }
        Ok(idx)
    }

    pub fn compile(&mut self, f: &Formula) -> Result<Node, EvalError> {
        use Formula as F;
        let b = Box::new;
        Ok(match f {
            F::False => Node::Bool(false),
            F::True => Node::Bool(true),
            F::Eq(x, y) => Node::Eq(self.var(x), self.var(y)),
            F::Less(x, y) => Node::Less(self.var(x), self.var(y)),
            F::Rel(r, args) => {
                let idx = self.rel_index(r, args.len())?;
                Node::Rel(idx, args.iter().map(|a| self.var(a)).collect())
            }
            F::So(x, args) => {
                let s = self.so_ref(x);
                Node::So(s, args.iter().map(|a| self.var(a)).collect())
            }
            F::Not(g) => Node::Not(b(self.compile(g)?)),
            F::Or(x, y) => Node::Or(b(self.compile(x)?), b(self.compile(y)?)),
            F::And(x, y) => Node::And(b(self.compile(x)?), b(self.compile(y)?)),
            F::Implies(x, y) => Node::Implies(b(self.compile(x)?), b(self.compile(y)?)),
            F::Iff(x, y) => Node::Iff(b(self.compile(x)?), b(self.compile(y)?)),
            F::OPlus(x, y) => Node::OPlus(b(self.compile(x)?), b(self.compile(y)?)),
            F::OTimes(x, y) => Node::OTimes(b(self.compile(x)?), b(self.compile(y)?)),
            F::Guard(x, y) => Node::Guard(b(self.compile(x)?), b(self.compile(y)?)),
            F::Const(c) => Node::Const(match c {
                crate::logic::ConstLit::Zero => self.semiring.zero(),
                crate::logic::ConstLit::One => self.semiring.one(),
                crate::logic::ConstLit::Lit(l) => self
                    .semiring
                    .parse_literal(l)
                    .map_err(|e| EvalError::BadLiteral { lit: l.clone(), msg: e.to_string() })?,
            }),
            F::ExistsFo(x, g) | F::ForallFo(x, g) | F::SumFo(x, g) | F::ProdFo(x, g) => {
                let s = self.bind_fo(x);
                let body = b(self.compile(g)?);
                self.fo_scope.pop();
                match f {
                    F::ExistsFo(..) => Node::Exists(s, body),
                    F::ForallFo(..) => Node::Forall(s, body),
                    F::SumFo(..) => Node::SumFo(s, body),
                    _ => Node::ProdFo(s, body),
                }
            }
            F::SumSo(..) if self.prune => self.chain(f)?,
            F::ExistsSo(x, k, g) | F::SumSo(x, k, g) | F::ProdSo(x, k, g) => {
                let s = self.bind_so(x);
                let body = b(self.compile(g)?);
                self.so_scope.pop();
                match f {
                    F::ExistsSo(..) => Node::ExistsSo(s, *k, body),
                    F::SumSo(..) => Node::SumSo(s, *k, body),
                    _ => Node::ProdSo(s, *k, body),
                }
            }
            F::Tc(c) | F::Dtc(c) => {
                let args = c.args.iter().map(|a| self.arg(a)).collect();
                let depth = self.fo_scope.len();
                let from = c.from.iter().map(|x| self.bind_fo(x)).collect();
                let to = c.to.iter().map(|x| self.bind_fo(x)).collect();
                let body = b(self.compile(&c.body)?);
                self.fo_scope.truncate(depth);
                Node::Closure { det: matches!(f, F::Dtc(_)), from, to, body, args }
            }
            F::Fix(kind, p) => {
                let args = p.args.iter().map(|a| self.arg(a)).collect();
                let depth = self.fo_scope.len();
                let vars = p.vars.iter().map(|x| self.bind_fo(x)).collect();
                let rel = self.bind_so(&p.rel);
                let body = b(self.compile(&p.body)?);
                self.so_scope.pop();
                self.fo_scope.truncate(depth);
                Node::Fix { kind: *kind, rel, vars, body, args }
            }
        })
    }

    /// Compile a maximal run of `sum X:k.` with its body's Boolean factors
    /// split into conjuncts that can reject partial assignments early.
    fn chain(&mut self, f: &Formula) -> Result<Node, EvalError> {
        let mut names = Vec::new();
        let mut body = f;
        while let Formula::SumSo(x, k, g) = body {
            names.push((x.clone(), *k));
            body = g;
        }
        let mut factors = Vec::new();
        flatten_otimes(body, &mut factors);
        let mut conjuncts = Vec::new();
        let mut rest = Vec::new();
        for fac in factors {
            if fac.is_boolean() {
                flatten_and(fac, &mut conjuncts);
            } else {
                rest.push(fac.clone());
            }
        }
        let depth = self.so_scope.len();
        let vars: Vec<(usize, usize)> = names.iter().map(|(x, k)| (self.bind_so(x), *k)).collect();
        let mut checks = vec![Vec::new(); vars.len() + 1];
        for c in conjuncts {
            let free = c.free_vars().so;
            let level = names
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, (x, _))| free.contains_key(x))
                .map(|(i, _)| i + 1)
                .max()
                .unwrap_or(0);
            checks[level].push(self.compile(c)?);
        }
        let body = self.compile(&Formula::big_otimes(rest))?;
        self.so_scope.truncate(depth);
        Ok(Node::SumSoChain { vars, checks, body: Box::new(body) })
    }
}

fn flatten_otimes<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::OTimes(a, b) => {
            flatten_otimes(a, out);
            flatten_otimes(b, out);
        }
        other => out.push(other),
    }
}

fn flatten_and<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        Formula::True => {}
        other => out.push(other),
    }
}
