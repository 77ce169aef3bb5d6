//! Exact weighted semantics on finite ordered structures.
//!
//! Formulas are resolved into slot-indexed nodes once per call and then
//! interpreted. Boolean subformulas contribute 𝟘 or 𝟙; `prod` over elements
//! runs in ascending order and over relations in `<*` order.

mod assign;
mod ir;

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

pub use assign::Assignment;
use ir::{Compiler, Env, Node, VarRef};

use crate::logic::{check_well_formed, Closure, FixKind, Fixpoint, Formula, WellFormedError, WfOptions};
use crate::semiring::{Semiring, Value};
use crate::structures::{unrank, Relation, Structure, DEFAULT_SUBSET_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("constant `{lit}`: {msg}")]
    BadLiteral { lit: String, msg: String },
    #[error("relation symbol `{0}` is not interpreted by the structure")]
    UnknownSymbol(String),
    #[error("`{name}` has arity {expected} but is used with {found} arguments")]
    Arity { name: String, expected: usize, found: usize },
    #[error("ill-formed formula: {0}")]
    IllFormed(#[from] WellFormedError),
}

impl EvalError {
    pub fn is_cap(&self) -> bool {
        matches!(self, EvalError::CapExceeded(_))
    }
}

/// Resource limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n^k` over which a second-order quantifier may enumerate.
    pub max_subset_base: usize,
    /// Stage limit for fixed points; `None` means `2^(n^k) + 1`.
    pub max_stages: Option<u64>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_subset_base: DEFAULT_SUBSET_CAP, max_stages: None }
    }
}

/// Counters collected during one evaluation. They depend only on the
/// inputs, never on timing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub so_assignments: u64,
    pub pruned: u64,
    pub fixpoint_stages: u64,
    pub closure_steps: u64,
}

#[derive(Clone, Debug)]
pub struct EvalContext<'a> {
    pub structure: &'a Structure,
    pub semiring: &'a Semiring,
    pub assignment: Assignment,
    pub caps: Caps,
    /// Reject partial assignments of leading `sum X:k.` runs as soon as a
    /// Boolean conjunct of the body fails. Never changes the value.
    pub prune: bool,
}

impl<'a> EvalContext<'a> {
    pub fn new(structure: &'a Structure, semiring: &'a Semiring) -> Self {
        EvalContext { structure, semiring, assignment: Assignment::default(), caps: Caps::default(), prune: true }
    }

    pub fn with_assignment(mut self, assignment: Assignment) -> Self {
        self.assignment = assignment;
        self
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        self
    }
}

fn prepare<'c>(f: &Formula, ctx: &'c EvalContext<'_>) -> Result<(Node, Env, Run<'c>), EvalError> {
    let opts = WfOptions::with_signature(ctx.structure.signature());
    check_well_formed(f, &opts)?;
    let mut c = Compiler::new(ctx.structure, ctx.semiring, &ctx.assignment, ctx.prune);
    let node = c.compile(f)?;
    let env = c.env();
    let run = Run { a: ctx.structure, sr: ctx.semiring, caps: ctx.caps, n: ctx.structure.size(), stats: Stats::default() };
    Ok((node, env, run))
}

/// Classical satisfaction of a Boolean formula.
pub fn eval_bool(f: &Formula, ctx: &EvalContext<'_>) -> Result<bool, EvalError> {
    let (node, mut env, mut run) = prepare(f, ctx)?;
    run.bool(&node, &mut env)
}

/// `⟦φ⟧(𝔄, ρ)`.
pub fn eval_weighted(f: &Formula, ctx: &EvalContext<'_>) -> Result<Value, EvalError> {
    eval_with_stats(f, ctx).map(|(v, _)| v)
}

/// As [`eval_weighted`], also returning evaluation counters.
pub fn eval_with_stats(f: &Formula, ctx: &EvalContext<'_>) -> Result<(Value, Stats), EvalError> {
    let (node, mut env, mut run) = prepare(f, ctx)?;
    let v = run.weight(&node, &mut env)?;
    Ok((v, run.stats))
}

/// The relation defined by a fixed point, before applying it to its arguments.
pub fn eval_fixpoint(kind: FixKind, fp: &Fixpoint, ctx: &EvalContext<'_>) -> Result<Relation, EvalError> {
    let f = Formula::Fix(kind, fp.clone());
    let (node, mut env, mut run) = prepare(&f, ctx)?;
    match node {
        Node::Fix { kind, rel, vars, body, .. } => run.fixpoint(kind, rel, &vars, &body, &mut env),
        _ => unreachable!("compiled a fixed point"),
    }
}

/// One application of the update operator `F_ψ` to `r`.
pub fn update_operator(fp: &Fixpoint, ctx: &EvalContext<'_>, r: &Relation) -> Result<Relation, EvalError> {
    let f = Formula::Fix(FixKind::Pfp, fp.clone());
    let (node, mut env, mut run) = prepare(&f, ctx)?;
    match node {
        Node::Fix { rel, vars, body, .. } => run.update(rel, &vars, &body, r, &mut env),
        _ => unreachable!("compiled a fixed point"),
    }
}

/// The relation of arity `2k` holding `(ā, b̄)` whenever `b̄` is reachable
/// from `ā` in one or more steps. With `det`, only steps out of tuples
/// with exactly one successor are used.
pub fn closure_relation(det: bool, c: &Closure, ctx: &EvalContext<'_>) -> Result<Relation, EvalError> {
    let f = if det { Formula::Dtc(c.clone()) } else { Formula::Tc(c.clone()) };
    let (node, mut env, mut run) = prepare(&f, ctx)?;
    match node {
        Node::Closure { det, from, to, body, .. } => {
            let reach = run.reachability(det, &from, &to, &body, &mut env)?;
            let n = ctx.structure.size();
            let k = from.len();
            let width = n.pow(k as u32);
            let mut out = Relation::empty(n, 2 * k);
            for (src, targets) in reach.iter().enumerate() {
                for dst in targets.ones() {
                    out.set_rank(src * width + dst, true);
                }
            }
            Ok(out)
        }
        _ => unreachable!("compiled a closure"),
    }
}

struct Run<'c> {
    a: &'c Structure,
    sr: &'c Semiring,
    caps: Caps,
    n: usize,
    stats: Stats,
}

fn value_of(env: &Env, v: VarRef) -> Option<usize> {
    match v {
        VarRef::Slot(s) => env.fo[s],
        VarRef::Elem(e) => Some(e),
    }
}

impl Run<'_> {
    fn tuple_rank(&self, env: &Env, args: &[VarRef]) -> Option<usize> {
        let mut m = 0;
        for &a in args {
            let v = value_of(env, a)?;
            if v >= self.n {
                return None;
            }
            m = m * self.n + v;
        }
        Some(m)
    }

    fn subset_base(&self, k: usize) -> Result<usize, EvalError> {
        let base = self.n.checked_pow(k as u32).unwrap_or(usize::MAX);
        if base > self.caps.max_subset_base {
            return Err(EvalError::CapExceeded(format!(
                "second-order quantifier over n^{k} = {base} tuples exceeds the limit of {}",
                self.caps.max_subset_base
            )));
        }
        Ok(base)
    }

    fn bool(&mut self, node: &Node, env: &mut Env) -> Result<bool, EvalError> {
        Ok(match node {
            Node::Bool(b) => *b,
            Node::Eq(x, y) => match (value_of(env, *x), value_of(env, *y)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
            Node::Less(x, y) => match (value_of(env, *x), value_of(env, *y)) {
                (Some(a), Some(b)) => a < b,
                _ => false,
            },
            Node::Rel(r, args) => match self.tuple_rank(env, args) {
                Some(m) => self.a.relation_at(*r).contains_rank(m),
                None => false,
            },
            Node::So(s, args) => match (self.tuple_rank(env, args), &env.so[*s]) {
                (Some(m), Some(rel)) => rel.contains_rank(m),
                _ => false,
            },
            Node::Not(g) => !self.bool(g, env)?,
            Node::Or(x, y) => self.bool(x, env)? || self.bool(y, env)?,
            Node::And(x, y) => self.bool(x, env)? && self.bool(y, env)?,
            Node::Implies(x, y) => !self.bool(x, env)? || self.bool(y, env)?,
            Node::Iff(x, y) => self.bool(x, env)? == self.bool(y, env)?,
            Node::Exists(s, g) | Node::Forall(s, g) => {
                let want = matches!(node, Node::Exists(..));
                let saved = env.fo[*s];
                let mut result = !want;
                for a in 0..self.n {
                    env.fo[*s] = Some(a);
                    if self.bool(g, env)? == want {
                        result = want;
                        break;
                    }
                }
                env.fo[*s] = saved;
                result
            }
            Node::ExistsSo(s, k, g) => {
                self.subset_base(*k)?;
                let saved = env.so[*s].take();
                env.so[*s] = Some(Relation::empty(self.n, *k));
                let mut found = false;
                loop {
                    self.stats.so_assignments += 1;
                    if self.bool(g, env)? {
                        found = true;
                        break;
                    }
                    if !env.so[*s].as_mut().expect("bound").next_star() {
                        break;
                    }
                }
                env.so[*s] = saved;
                found
            }
            Node::Closure { det, from, to, body, args } => {
                let k = from.len();
                let (src, dst) = args.split_at(k);
                let (Some(src), Some(dst)) = (self.tuple_rank(env, src), self.tuple_rank(env, dst)) else {
                    return Ok(false);
                };
                let reach = self.reach_from(*det, from, to, body, env, src)?;
                reach.contains(dst)
            }
            Node::Fix { kind, rel, vars, body, args } => {
                let Some(m) = self.tuple_rank(env, args) else {
                    return Ok(false);
                };
                self.fixpoint(*kind, *rel, vars, body, env)?.contains_rank(m)
            }
            _ => unreachable!("weighted node in Boolean position"),
        })
    }

    fn weight(&mut self, node: &Node, env: &mut Env) -> Result<Value, EvalError> {
        let sr = self.sr;
        Ok(match node {
            Node::Const(v) => v.clone(),
            Node::OPlus(x, y) => {
                let a = self.weight(x, env)?;
                let b = self.weight(y, env)?;
                sr.add(&a, &b)
            }
            Node::OTimes(x, y) => {
                let a = self.weight(x, env)?;
                if sr.is_zero(&a) {
                    return Ok(a);
                }
                let b = self.weight(y, env)?;
                sr.mul(&a, &b)
            }
            Node::Guard(beta, phi) => {
                if self.bool(beta, env)? {
                    self.weight(phi, env)?
                } else {
                    sr.one()
                }
            }
            Node::SumFo(s, g) | Node::ProdFo(s, g) => {
                let sum = matches!(node, Node::SumFo(..));
                let saved = env.fo[*s];
                let mut acc = if sum { sr.zero() } else { sr.one() };
                for a in 0..self.n {
                    env.fo[*s] = Some(a);
                    let v = self.weight(g, env)?;
                    if sum {
                        acc = sr.add(&acc, &v);
                    } else {
                        acc = sr.mul(&acc, &v);
                        if sr.is_zero(&acc) {
                            break;
                        }
                    }
                }
                env.fo[*s] = saved;
                acc
            }
            Node::SumSo(s, k, g) | Node::ProdSo(s, k, g) => {
                let sum = matches!(node, Node::SumSo(..));
                self.subset_base(*k)?;
                let saved = env.so[*s].take();
                env.so[*s] = Some(Relation::empty(self.n, *k));
                let mut acc = if sum { sr.zero() } else { sr.one() };
                loop {
                    self.stats.so_assignments += 1;
                    let v = self.weight(g, env)?;
                    if sum {
                        acc = sr.add(&acc, &v);
                    } else {
                        acc = sr.mul(&acc, &v);
                        if sr.is_zero(&acc) {
                            break;
                        }
                    }
                    if !env.so[*s].as_mut().expect("bound").next_star() {
                        break;
                    }
                }
                env.so[*s] = saved;
                acc
            }
            Node::SumSoChain { vars, checks, body } => {
                for &(_, k) in vars {
                    self.subset_base(k)?;
                }
                let mut acc = sr.zero();
                self.chain(0, vars, checks, body, env, &mut acc)?;
                acc
            }
            other => {
                let b = self.bool(other, env)?;
                sr.from_bool(b)
            }
        })
    }

    fn chain(
        &mut self,
        level: usize,
        vars: &[(usize, usize)],
        checks: &[Vec<Node>],
        body: &Node,
        env: &mut Env,
        acc: &mut Value,
    ) -> Result<(), EvalError> {
        for c in &checks[level] {
            if !self.bool(c, env)? {
                self.stats.pruned += 1;
                return Ok(());
            }
        }
        if level == vars.len() {
            let v = self.weight(body, env)?;
            *acc = self.sr.add(acc, &v);
            return Ok(());
        }
        let (s, k) = vars[level];
        let saved = env.so[s].take();
        env.so[s] = Some(Relation::empty(self.n, k));
        loop {
            self.stats.so_assignments += 1;
            self.chain(level + 1, vars, checks, body, env, acc)?;
            if !env.so[s].as_mut().expect("bound").next_star() {
                break;
            }
        }
        env.so[s] = saved;
        Ok(())
    }

    fn update(&mut self, rel: usize, vars: &[usize], body: &Node, r: &Relation, env: &mut Env) -> Result<Relation, EvalError> {
        let k = vars.len();
        let saved_rel = env.so[rel].replace(r.clone());
        let saved: Vec<_> = vars.iter().map(|&s| env.fo[s]).collect();
        let mut out = Relation::empty(self.n, k);
        for m in 0..self.n.pow(k as u32) {
            for (&s, v) in vars.iter().zip(unrank(self.n, k, m)) {
                env.fo[s] = Some(v);
            }
            if self.bool(body, env)? {
                out.set_rank(m, true);
            }
        }
        for (&s, v) in vars.iter().zip(saved) {
            env.fo[s] = v;
        }
        env.so[rel] = saved_rel;
        Ok(out)
    }

    fn stage_cap(&self, k: usize) -> u64 {
        self.caps.max_stages.unwrap_or_else(|| {
            let base = self.n.checked_pow(k as u32).unwrap_or(u32::MAX as usize);
            if base >= 63 {
                u64::MAX
            } else {
                (1u64 << base) + 1
            }
        })
    }

    fn fixpoint(&mut self, kind: FixKind, rel: usize, vars: &[usize], body: &Node, env: &mut Env) -> Result<Relation, EvalError> {
        let k = vars.len();
        let cap = self.stage_cap(k);
        let mut cur = match kind {
            FixKind::Gfp => Relation::full(self.n, k),
            _ => Relation::empty(self.n, k),
        };
        let mut seen = std::collections::HashSet::new();
        let mut stages = 0u64;
        loop {
            stages += 1;
            self.stats.fixpoint_stages += 1;
            if stages > cap {
                return Err(EvalError::CapExceeded(format!("fixed point did not settle within {cap} stages")));
            }
            let mut next = self.update(rel, vars, body, &cur, env)?;
            if kind == FixKind::Ifp {
                next.union_with(&cur);
            }
            if next == cur {
                return Ok(cur);
            }
            if kind == FixKind::Pfp {
                seen.insert(cur);
                if seen.contains(&next) {
                    return Ok(Relation::empty(self.n, k));
                }
            }
            cur = next;
        }
    }

    /// Step relation as adjacency bitsets over tuple ranks.
    fn steps(&mut self, det: bool, from: &[usize], to: &[usize], body: &Node, env: &mut Env) -> Result<Vec<fixedbitset::FixedBitSet>, EvalError> {
        let k = from.len();
        let width = self.n.pow(k as u32);
        let saved: Vec<_> = from.iter().chain(to).map(|&s| env.fo[s]).collect();
        let mut adj = vec![fixedbitset::FixedBitSet::with_capacity(width); width];
        for (src, row) in adj.iter_mut().enumerate() {
            for (&s, v) in from.iter().zip(unrank(self.n, k, src)) {
                env.fo[s] = Some(v);
            }
            for dst in 0..width {
                for (&s, v) in to.iter().zip(unrank(self.n, k, dst)) {
                    env.fo[s] = Some(v);
                }
                self.stats.closure_steps += 1;
                if self.bool(body, env)? {
                    row.insert(dst);
                }
            }
            if det && row.count_ones(..) != 1 {
                row.clear();
            }
        }
        for (&s, v) in from.iter().chain(to).zip(saved) {
            env.fo[s] = v;
        }
        Ok(adj)
    }

    fn reach_from(&mut self, det: bool, from: &[usize], to: &[usize], body: &Node, env: &mut Env, src: usize) -> Result<fixedbitset::FixedBitSet, EvalError> {
        let adj = self.steps(det, from, to, body, env)?;
        Ok(bfs(&adj, src))
    }

    fn reachability(&mut self, det: bool, from: &[usize], to: &[usize], body: &Node, env: &mut Env) -> Result<Vec<fixedbitset::FixedBitSet>, EvalError> {
        let adj = self.steps(det, from, to, body, env)?;
        Ok((0..adj.len()).map(|s| bfs(&adj, s)).collect())
    }
}

/// Nodes reachable from `src` by one or more edges.
fn bfs(adj: &[fixedbitset::FixedBitSet], src: usize) -> fixedbitset::FixedBitSet {
    let mut seen = fixedbitset::FixedBitSet::with_capacity(adj.len());
    let mut queue: VecDeque<usize> = adj[src].ones().collect();
    for d in adj[src].ones() {
        seen.insert(d);
    }
    while let Some(u) = queue.pop_front() {
        for v in adj[u].ones() {
            if !seen.put(v) {
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Value of every assignment of the free first-order variables, keyed by
/// the assigned tuple in lexicographic order of variable names.
pub fn eval_table(f: &Formula, ctx: &EvalContext<'_>) -> Result<BTreeMap<Vec<usize>, Value>, EvalError> {
    let vars: Vec<String> = f.free_vars().fo.into_iter().collect();
    let n = ctx.structure.size();
    let mut out = BTreeMap::new();
    for m in 0..n.pow(vars.len() as u32) {
        let t = unrank(n, vars.len(), m);
        let mut c = ctx.clone();
        for (v, &a) in vars.iter().zip(&t) {
            c.assignment.fo.insert(v.clone(), a);
        }
        out.insert(t, eval_weighted(f, &c)?);
    }
    Ok(out)
}
