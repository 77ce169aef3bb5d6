use std::collections::{BTreeMap, BTreeSet};

use super::prop::Prop;
use super::SatError;
use crate::logic::{ConstLit, Formula};
use crate::semiring::Semiring;
use crate::structures::{tuples_lex, Structure};

/// Name of the propositional variable for `X(ā)`.
pub fn prop_var(x: &str, t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|a| a.to_string()).collect();
    format!("{x}[{}]", parts.join(","))
}

/// Ground `⨁X₁…⨁Xₙ ψ` on `a` into `ψ_𝔄` with `SAT[S](ψ_𝔄) = ⟦φ⟧(𝔄)`.
///
/// Quantifiers become disjunctions and conjunctions over the universe,
/// atoms over the structure and the order become constants, and `Xᵢ(ā)`
/// becomes the variable `Xᵢ[ā]`. Boolean parts are grounded so that
/// exactly one disjunct holds under any assignment, which keeps their
/// value in `{𝟘, 𝟙}` in every semiring. Tuples whose variable vanishes
/// are conjoined as `x ∨ ¬x`, so every assignment of the `Xᵢ` is counted.
pub fn cook_levin_reduce(phi: &Formula, a: &Structure, sr: &Semiring) -> Result<Prop, SatError> {
    let mut prefix = BTreeMap::new();
    let mut order = Vec::new();
    let mut body = phi;
    while let Formula::SumSo(x, k, g) = body {
        if prefix.insert(x.clone(), *k).is_some() {
            return Err(SatError::Shape(format!("`{x}` is bound twice")));
        }
        order.push(x.clone());
        body = g;
    }
    if !phi.free_vars().is_empty() {
        return Err(SatError::Shape("the formula has free variables".into()));
    }
    let g = Grounder { a, sr, prefix: &prefix };
    let mut env = BTreeMap::new();
    let core = g.weighted(body, &mut env)?;
    let present: BTreeSet<String> = core.vars().into_iter().collect();
    let n = a.size();
    let mut pads = Vec::new();
    for x in &order {
        for t in tuples_lex(n, prefix[x]) {
            let v = prop_var(x, &t);
            if !present.contains(&v) {
                pads.push(Prop::Or(Box::new(Prop::Var(v.clone())), Box::new(Prop::NegVar(v))));
            }
        }
    }
    Ok(pads.into_iter().fold(core, |acc, p| Prop::And(Box::new(acc), Box::new(p))))
}

struct Grounder<'a> {
    a: &'a Structure,
    sr: &'a Semiring,
    prefix: &'a BTreeMap<String, usize>,
}

type Env = BTreeMap<String, usize>;

impl Grounder<'_> {
    fn elems(&self, env: &Env, args: &[String]) -> Vec<usize> {
        args.iter().map(|x| env[x]).collect()
    }

    fn konst(&self, b: bool) -> Prop {
        Prop::Const(self.sr.from_bool(b))
    }

    fn and(&self, x: Prop, y: Prop) -> Prop {
        Prop::and(self.sr, x, y)
    }

    fn or(&self, x: Prop, y: Prop) -> Prop {
        Prop::or(self.sr, x, y)
    }

    /// Disjoint disjunction of `(pos, neg)` pairs: `p₀ ∨ (n₀ ∧ p₁) ∨ …`,
    /// and the conjunction of the negations.
    fn any(&self, items: Vec<(Prop, Prop)>) -> (Prop, Prop) {
        let mut pos = self.konst(false);
        let mut none = self.konst(true);
        for (p, n) in items {
            pos = self.or(pos, self.and(none.clone(), p));
            none = self.and(none, n);
        }
        (pos, none)
    }

    /// Formulas for "β holds" and "β fails", each worth exactly 𝟙 when true.
    fn boolean(&self, f: &Formula, env: &mut Env) -> Result<(Prop, Prop), SatError> {
        use Formula::*;
        let lit = |b: bool| (self.konst(b), self.konst(!b));
        Ok(match f {
            True => lit(true),
            False => lit(false),
            Eq(x, y) => lit(env[x] == env[y]),
            Less(x, y) => lit(env[x] < env[y]),
            Rel(r, args) => {
                let rel = self.a.relation(r).ok_or_else(|| SatError::Shape(format!("unknown relation `{r}`")))?;
                lit(rel.contains(&self.elems(env, args)))
            }
            So(x, args) => {
                if !self.prefix.contains_key(x) {
                    return Err(SatError::Shape(format!("`{x}` is not bound by the prefix")));
                }
                let v = super::prop_var(x, &self.elems(env, args));
                (Prop::Var(v.clone()), Prop::NegVar(v))
            }
            Not(g) => {
                let (p, n) = self.boolean(g, env)?;
                (n, p)
            }
            And(x, y) => {
                let (px, nx) = self.boolean(x, env)?;
                let (py, ny) = self.boolean(y, env)?;
                (self.and(px.clone(), py), self.or(nx, self.and(px, ny)))
            }
            Or(x, y) => {
                let a = self.boolean(x, env)?;
                let b = self.boolean(y, env)?;
                self.any(vec![a, b])
            }
            Implies(x, y) => {
                let (px, nx) = self.boolean(x, env)?;
                let b = self.boolean(y, env)?;
                self.any(vec![(nx, px), b])
            }
            Iff(x, y) => {
                let (px, nx) = self.boolean(x, env)?;
                let (py, ny) = self.boolean(y, env)?;
                let same = self.or(self.and(px.clone(), py.clone()), self.and(nx.clone(), ny.clone()));
                let diff = self.or(self.and(px, ny), self.and(nx, py));
                (same, diff)
            }
            ExistsFo(x, g) | ForallFo(x, g) => {
                let saved = env.get(x).copied();
                let mut items = Vec::new();
                for e in 0..self.a.size() {
                    env.insert(x.clone(), e);
                    let (p, n) = self.boolean(g, env)?;
                    items.push(if matches!(f, ExistsFo(..)) { (p, n) } else { (n, p) });
                }
                restore(env, x, saved);
                let (some, none) = self.any(items);
                if matches!(f, ExistsFo(..)) {
                    (some, none)
                } else {
                    (none, some)
                }
            }
            ExistsSo(..) | Tc(_) | Dtc(_) | Fix(..) => {
                return Err(SatError::Shape("second-order quantifiers, closures and fixed points cannot be grounded".into()));
            }
            _ => return Err(SatError::Shape("weighted subformula under a Boolean connective".into())),
        })
    }

    fn weighted(&self, f: &Formula, env: &mut Env) -> Result<Prop, SatError> {
        use Formula::*;
        let sr = self.sr;
        Ok(match f {
            Const(ConstLit::Zero) => Prop::Const(sr.zero()),
            Const(ConstLit::One) => Prop::Const(sr.one()),
            Const(ConstLit::Lit(l)) => Prop::Const(sr.parse_literal(l).map_err(|e| SatError::BadLiteral(e.to_string()))?),
            OPlus(x, y) => {
                let p = self.weighted(x, env)?;
                self.or(p, self.weighted(y, env)?)
            }
            OTimes(x, y) => {
                let p = self.weighted(x, env)?;
                self.and(p, self.weighted(y, env)?)
            }
            Guard(beta, phi) => {
                let (p, n) = self.boolean(beta, env)?;
                let body = self.weighted(phi, env)?;
                self.or(self.and(p, body), n)
            }
            SumFo(x, g) | ProdFo(x, g) => {
                let saved = env.get(x).copied();
                let mut acc = if matches!(f, SumFo(..)) { Prop::Const(sr.zero()) } else { Prop::Const(sr.one()) };
                for e in 0..self.a.size() {
                    env.insert(x.clone(), e);
                    let v = self.weighted(g, env)?;
                    acc = if matches!(f, SumFo(..)) { self.or(acc, v) } else { self.and(acc, v) };
                }
                restore(env, x, saved);
                acc
            }
            SumSo(..) | ProdSo(..) => {
                return Err(SatError::Shape("second-order sum or product below the leading prefix".into()));
            }
            _ => self.boolean(f, env)?.0,
        })
    }
}

fn restore(env: &mut Env, x: &str, saved: Option<usize>) {
    match saved {
        Some(v) => {
            env.insert(x.to_string(), v);
        }
        None => {
            env.remove(x);
        }
    }
}
