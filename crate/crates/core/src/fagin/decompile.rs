//! Weighted Turing machine to wESO sentence.
//!
//! Time points and tape cells are `k`-tuples of elements, ordered
//! lexicographically, so a structure of size `n` admits `n^k` configurations
//! and `n^k - 1` steps. The machine is padded first: its accepting states
//! become goal states that idle with weight 𝟙, so every accepting computation
//! of at most `n^k - 1` steps extends to exactly one run of exactly that
//! length.
//!
//! `T{a}(p̄, t̄)` says cell `p̄` holds symbol number `a` at time `t̄`;
//! `H{q}(p̄, t̄)` says the head is on `p̄` in state number `q`. The Boolean
//! part is a list of clauses whose satisfying assignments are exactly the
//! accepting runs; the weighted part multiplies, time point by time point,
//! the weight of the transition taken.

use std::collections::BTreeSet;

use super::FaginError;
use crate::logic::build::{tuple_bot, tuple_eq, tuple_succ, tuple_top};
use crate::logic::{ConstLit, Formula, Fresh};
use crate::machine::{pad_machine, Move, WeightedTm};
use crate::structures::Signature;

/// A translated machine, kept in pieces so callers can inspect or perturb
/// single clauses.
#[derive(Clone, Debug)]
pub struct Decompiled {
    /// Leading `⨁X:arity` quantifiers, outermost first.
    pub so_prefix: Vec<(String, usize)>,
    /// Clauses of the Boolean part, labelled: symbols, states, acceptance,
    /// transitions, initial configuration, and for unordered translations a
    /// leading order clause.
    pub psi: Vec<(String, Formula)>,
    /// Weighted part: the product of the transition weights.
    pub chi: Formula,
    pub k: usize,
}

impl Decompiled {
    /// `⨁X̄ (ψ ⊗ χ)`.
    pub fn sentence(&self) -> Formula {
        self.close(Formula::otimes(self.psi_formula(), self.chi.clone()))
    }

    /// `⨁X̄ ψ`: over ℕ this counts the satisfying assignments.
    pub fn count_sentence(&self) -> Formula {
        self.close(self.psi_formula())
    }

    pub fn psi_formula(&self) -> Formula {
        Formula::big_and(self.psi.iter().map(|(_, c)| c.clone()))
    }

    /// Same translation with clause `i` replaced.
    pub fn with_clause(&self, i: usize, clause: Formula) -> Decompiled {
        let mut out = self.clone();
        out.psi[i].1 = clause;
        out
    }

    fn close(&self, body: Formula) -> Formula {
        self.so_prefix.iter().rev().fold(body, |f, (x, k)| Formula::sum_so(x, *k, f))
    }
}

/// Translate `m` for structures over `sig`, with time and space `n^k`.
///
/// The signature has at most one relation, of arity at most `k`; the
/// machine's alphabet contains the input symbols the encoding uses.
pub fn wtm_to_weso(m: &WeightedTm, sig: &Signature, k: usize) -> Result<Decompiled, FaginError> {
    Builder::new(m, sig, k, None)?.build()
}

/// Translation for unordered structures: a leading `⨁L:2` ranges over
/// strict linear orders and every use of `<` reads `L` instead.
///
/// The semiring must be idempotent and commutative.
pub fn wtm_to_weso_unordered(m: &WeightedTm, sig: &Signature, k: usize) -> Result<Decompiled, FaginError> {
    let sr = m.semiring();
    let missing: Vec<&str> = [(!sr.is_idempotent()).then_some("idempotent"), (!sr.is_commutative()).then_some("commutative")]
        .into_iter()
        .flatten()
        .collect();
    if !missing.is_empty() {
        return Err(FaginError::SemiringFlags { semiring: sr.name().to_string(), missing: missing.join(" and ") });
    }
    let ordered = Builder::new(m, sig, k, Some("L"))?.build()?;
    let l = "L".to_string();
    let mut fresh = Fresh::new(["x", "y", "z"].into_iter().map(String::from).collect::<BTreeSet<_>>());
    let (x, y, z) = (fresh.name("x"), fresh.name("y"), fresh.name("z"));
    let lt = |a: &str, b: &str| Formula::so(&l, &[a, b]);
    let theta = vec![
        (ORDER.to_string(), Formula::forall(&x, Formula::not(lt(&x, &x)))),
        (
            ORDER.to_string(),
            Formula::forall(
                &x,
                Formula::forall(
                    &y,
                    Formula::forall(&z, Formula::implies(Formula::and(lt(&x, &y), lt(&y, &z)), lt(&x, &z))),
                ),
            ),
        ),
        (
            ORDER.to_string(),
            Formula::forall(
                &x,
                Formula::forall(&y, Formula::big_or([Formula::eq(&x, &y), lt(&x, &y), lt(&y, &x)])),
            ),
        ),
    ];
    let mut so_prefix = vec![(l.clone(), 2)];
    so_prefix.extend(ordered.so_prefix.iter().cloned());
    let mut psi = theta;
    psi.extend(ordered.psi.iter().map(|(n, c)| (n.clone(), replace_less(c, &l))));
    Ok(Decompiled { so_prefix, psi: group(psi), chi: replace_less(&ordered.chi, &l), k })
}

/// Labels of the clauses of the Boolean part.
pub const SYMBOLS: &str = "one symbol per cell";
pub const STATES: &str = "one state and head per time";
pub const ACCEPT: &str = "reaches a goal state";
pub const MOVES: &str = "steps follow transitions";
pub const INITIAL: &str = "starts on the input";
pub const ORDER: &str = "L is a strict linear order";

/// Merge consecutive parts with the same label into one conjunction.
fn group(parts: Vec<(String, Formula)>) -> Vec<(String, Formula)> {
    let mut out: Vec<(String, Vec<Formula>)> = Vec::new();
    for (label, f) in parts {
        match out.last_mut() {
            Some((l, fs)) if *l == label => fs.push(f),
            _ => out.push((label, vec![f])),
        }
    }
    out.into_iter().map(|(l, fs)| (l, Formula::big_and(fs))).collect()
}

fn replace_less(f: &Formula, l: &str) -> Formula {
    use Formula::*;
    let r = |g: &Formula| Box::new(replace_less(g, l));
    match f {
        Less(x, y) => So(l.to_string(), vec![x.clone(), y.clone()]),
        False | True | Eq(..) | Rel(..) | So(..) | Const(_) => f.clone(),
        Not(g) => Not(r(g)),
        Or(a, b) => Or(r(a), r(b)),
        And(a, b) => And(r(a), r(b)),
        Implies(a, b) => Implies(r(a), r(b)),
        Iff(a, b) => Iff(r(a), r(b)),
        OPlus(a, b) => OPlus(r(a), r(b)),
        OTimes(a, b) => OTimes(r(a), r(b)),
        Guard(a, b) => Guard(r(a), r(b)),
        ExistsFo(x, g) => ExistsFo(x.clone(), r(g)),
        ForallFo(x, g) => ForallFo(x.clone(), r(g)),
        SumFo(x, g) => SumFo(x.clone(), r(g)),
        ProdFo(x, g) => ProdFo(x.clone(), r(g)),
        ExistsSo(x, a, g) => ExistsSo(x.clone(), *a, r(g)),
        SumSo(x, a, g) => SumSo(x.clone(), *a, r(g)),
        ProdSo(x, a, g) => ProdSo(x.clone(), *a, r(g)),
        Tc(_) | Dtc(_) | Fix(..) => unreachable!("translations contain no closures or fixed points"),
    }
}

struct Builder<'a> {
    m: WeightedTm,
    goal: BTreeSet<usize>,
    sig: &'a Signature,
    k: usize,
    fresh: Fresh,
    zero: usize,
    one: Option<usize>,
}

fn tuple(base: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{base}{i}")).collect()
}

fn forall_all(xs: &[String], f: Formula) -> Formula {
    xs.iter().rev().fold(f, |g, x| Formula::forall(x, g))
}

fn exists_all(xs: &[String], f: Formula) -> Formula {
    xs.iter().rev().fold(f, |g, x| Formula::exists(x, g))
}

fn args2(xs: &[String], ys: &[String]) -> Vec<String> {
    xs.iter().chain(ys).cloned().collect()
}

impl<'a> Builder<'a> {
    fn new(m: &WeightedTm, sig: &'a Signature, k: usize, reserved: Option<&str>) -> Result<Self, FaginError> {
        if sig.len() > 1 {
            return Err(FaginError::Unsupported(format!(
                "translating machines needs a signature with at most one relation, got {}",
                sig.len()
            )));
        }
        let arity = sig.max_arity().max(1);
        if k < arity {
            return Err(FaginError::KTooSmall { k, arity });
        }
        let symbol = |s: &str| {
            m.symbol_id(s)
                .ok_or_else(|| FaginError::Unsupported(format!("the machine's alphabet lacks the input symbol `{s}`")))
        };
        let zero = symbol("0")?;
        let one = if sig.is_empty() { m.symbol_id("1") } else { Some(symbol("1")?) };
        let padded = pad_machine(m);
        let mut taken: BTreeSet<String> = ["p", "t", "s", "u", "v", "x"]
            .iter()
            .flat_map(|b| tuple(b, k))
            .collect();
        taken.extend(sig.iter().map(|(r, _)| r.to_string()));
        taken.extend(reserved.map(String::from));
        Ok(Builder { m: padded.machine, goal: padded.goal, sig, k, fresh: Fresh::new(taken), zero, one })
    }

    fn t_name(a: usize) -> String {
        format!("T{a}")
    }

    fn h_name(q: usize) -> String {
        format!("H{q}")
    }

    fn t(&self, a: usize, p: &[String], t: &[String]) -> Formula {
        Formula::So(Self::t_name(a), args2(p, t))
    }

    fn h(&self, q: usize, p: &[String], t: &[String]) -> Formula {
        Formula::So(Self::h_name(q), args2(p, t))
    }

    fn build(mut self) -> Result<Decompiled, FaginError> {
        let k = self.k;
        let (p, t, s, u, v) = (tuple("p", k), tuple("t", k), tuple("s", k), tuple("u", k), tuple("v", k));
        let nsym = self.m.symbols().len();
        let nst = self.m.states().len();
        let mut psi = Vec::new();

        // one symbol per cell
        psi.push((
            SYMBOLS.to_string(),
            forall_all(&p, forall_all(&t, Formula::big_or((0..nsym).map(|a| self.t(a, &p, &t))))),
        ));
        for a in 0..nsym {
            for b in a + 1..nsym {
                psi.push((
                    SYMBOLS.to_string(),
                    forall_all(&p, forall_all(&t, Formula::not(Formula::and(self.t(a, &p, &t), self.t(b, &p, &t))))),
                ));
            }
        }

        // one state and one head position per time point
        psi.push((
            STATES.to_string(),
            forall_all(&t, exists_all(&p, Formula::big_or((0..nst).map(|q| self.h(q, &p, &t))))),
        ));
        for q in 0..nst {
            for r in q..nst {
                let both = Formula::and(self.h(q, &p, &t), self.h(r, &u, &t));
                let body = if q == r { Formula::implies(both, tuple_eq(&p, &u)) } else { Formula::not(both) };
                psi.push((STATES.to_string(), forall_all(&t, forall_all(&p, forall_all(&u, body)))));
            }
        }

        // acceptance
        let goal: Vec<usize> = self.goal.iter().copied().collect();
        psi.push((
            ACCEPT.to_string(),
            exists_all(&t, exists_all(&p, Formula::big_or(goal.iter().map(|&q| self.h(q, &p, &t))))),
        ));

        // transitions, one clause per (state, symbol)
        for q in 0..nst {
            for a in 0..nsym {
                let steps: Vec<Formula> = self
                    .m
                    .applicable(q, a)
                    .to_vec()
                    .into_iter()
                    .map(|e| self.step(e, &p, &t, &s, &u, &v))
                    .collect();
                let not_last = Formula::not(tuple_top(&t, &mut self.fresh));
                let pre = Formula::big_and([not_last, self.h(q, &p, &t), self.t(a, &p, &t)]);
                psi.push((
                    MOVES.to_string(),
                    forall_all(&t, forall_all(&p, Formula::implies(pre, Formula::big_or(steps)))),
                ));
            }
        }

        // initial configuration
        let start = Formula::and(tuple_bot(&t, &mut self.fresh), tuple_bot(&p, &mut self.fresh));
        psi.push((
            INITIAL.to_string(),
            forall_all(&t, forall_all(&p, Formula::implies(start, self.h(self.m.initial(), &p, &t)))),
        ));
        psi.extend(self.initial_tape(&p, &t));

        let chi = self.chi(&p, &t, &s, &u)?;
        let mut so_prefix: Vec<(String, usize)> = (0..nsym).map(|a| (Self::t_name(a), 2 * k)).collect();
        so_prefix.extend((0..nst).map(|q| (Self::h_name(q), 2 * k)));
        Ok(Decompiled { so_prefix, psi: group(psi), chi, k })
    }

    /// `ū` is where the head lands from `p̄` moving `dir`.
    fn moved(&mut self, dir: Move, p: &[String], u: &[String]) -> Formula {
        match dir {
            Move::Stay => tuple_eq(p, u),
            Move::Right => tuple_succ(p, u, &mut self.fresh),
            Move::Left => tuple_succ(u, p, &mut self.fresh),
        }
    }

    /// The configuration at `t̄ + 1` follows from the one at `t̄` by transition `e`.
    fn step(&mut self, e: usize, p: &[String], t: &[String], s: &[String], u: &[String], v: &[String]) -> Formula {
        let tr = self.m.transitions()[e].clone();
        let nsym = self.m.symbols().len();
        let next = tuple_succ(t, s, &mut self.fresh);
        let head = exists_all(u, Formula::and(self.moved(tr.dir, p, u), self.h(tr.to, u, s)));
        let frame = forall_all(
            v,
            Formula::implies(
                Formula::not(tuple_eq(v, p)),
                Formula::big_and((0..nsym).map(|c| Formula::iff(self.t(c, v, s), self.t(c, v, t)))),
            ),
        );
        exists_all(s, Formula::big_and([next, head, self.t(tr.write, p, s), frame]))
    }

    fn initial_tape(&mut self, p: &[String], t: &[String]) -> Vec<(String, Formula)> {
        let k = self.k;
        let (rel, r) = match self.sig.iter().next() {
            Some((name, r)) => (Some(name.to_string()), r),
            None => (None, 1),
        };
        let (pad, data) = p.split_at(k - r);
        let first = tuple_bot(t, &mut self.fresh);
        let in_input = tuple_bot(pad, &mut self.fresh);
        let holds = rel.as_ref().map(|name| Formula::Rel(name.clone(), data.to_vec()));
        let mut out = Vec::new();
        let at0 = |cond: Formula, then: Formula| forall_all(t, forall_all(p, Formula::implies(Formula::and(first.clone(), cond), then)));
        match (&holds, self.one) {
            (Some(h), Some(one)) => {
                out.push((INITIAL.to_string(), at0(Formula::and(in_input.clone(), h.clone()), self.t(one, p, t))));
                out.push((
                    INITIAL.to_string(),
                    at0(Formula::and(in_input.clone(), Formula::not(h.clone())), self.t(self.zero, p, t)),
                ));
            }
            _ => out.push((INITIAL.to_string(), at0(in_input.clone(), self.t(self.zero, p, t)))),
        }
        if r < k {
            out.push((INITIAL.to_string(), at0(Formula::not(in_input), self.t(self.m.blank(), p, t))));
        }
        out
    }

    /// `⨂t̄ (¬last(t̄) ? ⨁_δ wt(δ) ⊗ taken_δ(t̄))`.
    fn chi(&mut self, p: &[String], t: &[String], s: &[String], u: &[String]) -> Result<Formula, FaginError> {
        let sr = self.m.semiring().clone();
        let mut terms = Vec::new();
        for e in 0..self.m.transitions().len() {
            let tr = self.m.transitions()[e].clone();
            let next = tuple_succ(t, s, &mut self.fresh);
            let moved = self.moved(tr.dir, p, u);
            let taken = exists_all(
                p,
                Formula::big_and([
                    self.h(tr.from, p, t),
                    self.t(tr.read, p, t),
                    exists_all(
                        s,
                        Formula::big_and([next, self.t(tr.write, p, s), exists_all(u, Formula::and(moved, self.h(tr.to, u, s)))]),
                    ),
                ]),
            );
            let term = if tr.weight == sr.one() {
                taken
            } else if sr.is_zero(&tr.weight) {
                Formula::otimes(Formula::zero(), taken)
            } else {
                let lit = sr.format(&tr.weight);
                match sr.parse_literal(&lit) {
                    Ok(v) if v == tr.weight => {}
                    _ => {
                        return Err(FaginError::BadLiteral { lit, msg: "weight has no literal that reads back".into() });
                    }
                }
                Formula::otimes(Formula::Const(ConstLit::Lit(lit)), taken)
            };
            terms.push(term);
        }
        let not_last = Formula::not(tuple_top(t, &mut self.fresh));
        let body = Formula::guard(not_last, Formula::big_oplus(terms));
        Ok(t.iter().rev().fold(body, |f, x| Formula::prod(x, f)))
    }
}

#[cfg(test)]
#[path = "decompile/tests.rs"]
mod tests;
