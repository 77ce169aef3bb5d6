//! Capture-avoiding renaming of free variables.

use std::collections::{BTreeSet, HashMap};

use super::ast::{Arg, Closure, Fixpoint, Formula};

/// Every variable name occurring in `f`, bound or free, of either order.
pub fn all_names(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    f.visit(&mut |g| {
        use Formula::*;
        match g {
            Eq(x, y) | Less(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Rel(_, a) => out.extend(a.iter().cloned()),
            So(x, a) => {
                out.insert(x.clone());
                out.extend(a.iter().cloned());
            }
            ExistsFo(x, _) | ForallFo(x, _) | SumFo(x, _) | ProdFo(x, _) | ExistsSo(x, _, _)
            | SumSo(x, _, _) | ProdSo(x, _, _) => {
                out.insert(x.clone());
            }
            Tc(c) | Dtc(c) => {
                out.extend(c.from.iter().cloned());
                out.extend(c.to.iter().cloned());
                out.extend(arg_vars(&c.args));
            }
            Fix(_, p) => {
                out.insert(p.rel.clone());
                out.extend(p.vars.iter().cloned());
                out.extend(arg_vars(&p.args));
            }
            _ => {}
        }
    });
    out
}

fn arg_vars(args: &[Arg]) -> impl Iterator<Item = String> + '_ {
    args.iter().filter_map(|a| match a {
        Arg::Var(v) => Some(v.clone()),
        Arg::Elem(_) => None,
    })
}

/// Fresh-name supply avoiding a growing set of taken names.
pub struct Fresh {
    taken: BTreeSet<String>,
}

impl Fresh {
    pub fn new(taken: BTreeSet<String>) -> Self {
        Fresh { taken }
    }

    pub fn avoiding(f: &Formula) -> Self {
        Fresh::new(all_names(f))
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    /// `base` followed by the smallest number that makes it unused.
    pub fn name(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "v" } else { stem };
        let mut i = 1;
        loop {
            let cand = format!("{stem}{i}");
            if self.taken.insert(cand.clone()) {
                return cand;
            }
            i += 1;
        }
    }
}

/// Replace free first-order variables per `fo` and free second-order
/// variables per `so`, renaming binders that would capture a replacement.
pub fn substitute(f: &Formula, fo: &HashMap<String, String>, so: &HashMap<String, String>) -> Formula {
    let mut taken = all_names(f);
    taken.extend(fo.values().cloned());
    taken.extend(so.values().cloned());
    let mut fresh = Fresh::new(taken);
    Subst { fresh: &mut fresh }.go(f, fo, so)
}

struct Subst<'a> {
    fresh: &'a mut Fresh,
}

impl Subst<'_> {
    fn fo_binder(&mut self, x: &str, fo: &HashMap<String, String>) -> (String, HashMap<String, String>) {
        let mut inner = fo.clone();
        inner.remove(x);
        if inner.values().any(|v| v == x) {
            let y = self.fresh.name(x);
            inner.insert(x.to_string(), y.clone());
            (y, inner)
        } else {
            (x.to_string(), inner)
        }
    }

    fn so_binder(&mut self, x: &str, so: &HashMap<String, String>) -> (String, HashMap<String, String>) {
        let mut inner = so.clone();
        inner.remove(x);
        if inner.values().any(|v| v == x) {
            let y = self.fresh.name(x);
            inner.insert(x.to_string(), y.clone());
            (y, inner)
        } else {
            (x.to_string(), inner)
        }
    }

    fn go(&mut self, f: &Formula, fo: &HashMap<String, String>, so: &HashMap<String, String>) -> Formula {
        use Formula::*;
        let v = |x: &String| fo.get(x).cloned().unwrap_or_else(|| x.clone());
        let args = |a: &[Arg]| -> Vec<Arg> {
            a.iter()
                .map(|t| match t {
                    Arg::Var(x) => Arg::Var(v(x)),
                    e => e.clone(),
                })
                .collect()
        };
        match f {
            False | True | Const(_) => f.clone(),
            Eq(x, y) => Eq(v(x), v(y)),
            Less(x, y) => Less(v(x), v(y)),
            Rel(r, a) => Rel(r.clone(), a.iter().map(v).collect()),
            So(x, a) => So(so.get(x).cloned().unwrap_or_else(|| x.clone()), a.iter().map(v).collect()),
            Not(g) => Formula::not(self.go(g, fo, so)),
            Or(a, b) => Formula::or(self.go(a, fo, so), self.go(b, fo, so)),
            And(a, b) => Formula::and(self.go(a, fo, so), self.go(b, fo, so)),
            Implies(a, b) => Formula::implies(self.go(a, fo, so), self.go(b, fo, so)),
            Iff(a, b) => Formula::iff(self.go(a, fo, so), self.go(b, fo, so)),
            OPlus(a, b) => Formula::oplus(self.go(a, fo, so), self.go(b, fo, so)),
            OTimes(a, b) => Formula::otimes(self.go(a, fo, so), self.go(b, fo, so)),
            Guard(a, b) => Formula::guard(self.go(a, fo, so), self.go(b, fo, so)),
            ExistsFo(x, g) | ForallFo(x, g) | SumFo(x, g) | ProdFo(x, g) => {
                let (y, inner) = self.fo_binder(x, fo);
                let body = Box::new(self.go(g, &inner, so));
                match f {
                    ExistsFo(..) => ExistsFo(y, body),
                    ForallFo(..) => ForallFo(y, body),
                    SumFo(..) => SumFo(y, body),
                    _ => ProdFo(y, body),
                }
            }
            ExistsSo(x, k, g) | SumSo(x, k, g) | ProdSo(x, k, g) => {
                let (y, inner) = self.so_binder(x, so);
                let body = Box::new(self.go(g, fo, &inner));
                match f {
                    ExistsSo(..) => ExistsSo(y, *k, body),
                    SumSo(..) => SumSo(y, *k, body),
                    _ => ProdSo(y, *k, body),
                }
            }
            Tc(c) | Dtc(c) => {
                let mut inner = fo.clone();
                let mut from = Vec::new();
                let mut to = Vec::new();
                for x in c.from.iter().chain(&c.to) {
                    inner.remove(x);
                }
                for (src, dst) in [(&c.from, &mut from), (&c.to, &mut to)] {
                    for x in src {
                        if fo.values().any(|t| t == x) {
                            let y = self.fresh.name(x);
                            inner.insert(x.clone(), y.clone());
                            dst.push(y);
                        } else {
                            dst.push(x.clone());
                        }
                    }
                }
                let cl = Closure { from, to, body: Box::new(self.go(&c.body, &inner, so)), args: args(&c.args) };
                if matches!(f, Tc(_)) {
                    Tc(cl)
                } else {
                    Dtc(cl)
                }
            }
            Fix(kind, p) => {
                let mut inner = fo.clone();
                for x in &p.vars {
                    inner.remove(x);
                }
                let mut vars = Vec::new();
                for x in &p.vars {
                    if fo.values().any(|t| t == x) {
                        let y = self.fresh.name(x);
                        inner.insert(x.clone(), y.clone());
                        vars.push(y);
                    } else {
                        vars.push(x.clone());
                    }
                }
                let (rel, so_inner) = self.so_binder(&p.rel, so);
                Fix(
                    *kind,
                    Fixpoint { rel, vars, body: Box::new(self.go(&p.body, &inner, &so_inner)), args: args(&p.args) },
                )
            }
        }
    }
}

/// Rename every binder to a name used by no other binder and by no free
/// variable. Free variables keep their names.
pub fn rename_apart(f: &Formula) -> Formula {
    let mut fresh = Fresh::avoiding(f);
    apart(f, &mut fresh, &HashMap::new(), &HashMap::new())
}

fn apart(
    f: &Formula,
    fresh: &mut Fresh,
    fo: &HashMap<String, String>,
    so: &HashMap<String, String>,
) -> Formula {
    use Formula::*;
    let v = |x: &String| fo.get(x).cloned().unwrap_or_else(|| x.clone());
    let args = |a: &[Arg]| -> Vec<Arg> {
        a.iter()
            .map(|t| match t {
                Arg::Var(x) => Arg::Var(v(x)),
                e => e.clone(),
            })
            .collect()
    };
    match f {
        False | True | Const(_) => f.clone(),
        Eq(x, y) => Eq(v(x), v(y)),
        Less(x, y) => Less(v(x), v(y)),
        Rel(r, a) => Rel(r.clone(), a.iter().map(v).collect()),
        So(x, a) => So(so.get(x).cloned().unwrap_or_else(|| x.clone()), a.iter().map(v).collect()),
        Not(g) => Formula::not(apart(g, fresh, fo, so)),
        Or(a, b) => Formula::or(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        And(a, b) => Formula::and(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        Implies(a, b) => Formula::implies(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        Iff(a, b) => Formula::iff(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        OPlus(a, b) => Formula::oplus(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        OTimes(a, b) => Formula::otimes(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        Guard(a, b) => Formula::guard(apart(a, fresh, fo, so), apart(b, fresh, fo, so)),
        ExistsFo(x, g) | ForallFo(x, g) | SumFo(x, g) | ProdFo(x, g) => {
            let y = fresh.name(x);
            let mut inner = fo.clone();
            inner.insert(x.clone(), y.clone());
            let body = Box::new(apart(g, fresh, &inner, so));
            match f {
                ExistsFo(..) => ExistsFo(y, body),
                ForallFo(..) => ForallFo(y, body),
                SumFo(..) => SumFo(y, body),
                _ => ProdFo(y, body),
            }
        }
        ExistsSo(x, k, g) | SumSo(x, k, g) | ProdSo(x, k, g) => {
            let y = fresh.name(x);
            let mut inner = so.clone();
            inner.insert(x.clone(), y.clone());
            let body = Box::new(apart(g, fresh, fo, &inner));
            match f {
                ExistsSo(..) => ExistsSo(y, *k, body),
                SumSo(..) => SumSo(y, *k, body),
                _ => ProdSo(y, *k, body),
            }
        }
        Tc(c) | Dtc(c) => {
            let mut inner = fo.clone();
            let mut rn = |xs: &[String], inner: &mut HashMap<String, String>| -> Vec<String> {
                xs.iter()
                    .map(|x| {
                        let y = fresh.name(x);
                        inner.insert(x.clone(), y.clone());
                        y
                    })
                    .collect()
            };
            let from = rn(&c.from, &mut inner);
            let to = rn(&c.to, &mut inner);
            let body = Box::new(apart(&c.body, fresh, &inner, so));
            let cl = Closure { from, to, body, args: args(&c.args) };
            if matches!(f, Tc(_)) {
                Tc(cl)
            } else {
                Dtc(cl)
            }
        }
        Fix(kind, p) => {
            let mut inner = fo.clone();
            let vars = p
                .vars
                .iter()
                .map(|x| {
                    let y = fresh.name(x);
                    inner.insert(x.clone(), y.clone());
                    y
                })
                .collect();
            let rel = fresh.name(&p.rel);
            let mut so_inner = so.clone();
            so_inner.insert(p.rel.clone(), rel.clone());
            let body = Box::new(apart(&p.body, fresh, &inner, &so_inner));
            Fix(*kind, Fixpoint { rel, vars, body, args: args(&p.args) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn substitution_renames_capturing_binder() {
        let f = parse_formula("exists y. e(x, y)").unwrap();
        let g = substitute(&f, &HashMap::from([("x".into(), "y".into())]), &HashMap::new());
        assert_eq!(g.to_string(), "exists y1. e(y, y1)");
    }

    #[test]
    fn shadowed_variables_untouched() {
        let f = parse_formula("(p(x) & exists x. q(x))").unwrap();
        let g = substitute(&f, &HashMap::from([("x".into(), "z".into())]), &HashMap::new());
        assert_eq!(g.to_string(), "(p(z) & exists x. q(x))");
    }

    #[test]
    fn so_substitution() {
        let f = parse_formula("(X(x) & exists Y:1. Y(x))").unwrap();
        let g = substitute(&f, &HashMap::new(), &HashMap::from([("X".into(), "Y".into())]));
        assert_eq!(g.to_string(), "(Y(x) & exists Y1:1. Y1(x))");
    }

    #[test]
    fn rename_apart_makes_binders_unique() {
        let f = parse_formula("((exists x. p(x)) & exists x. q(x, y))").unwrap();
        let g = rename_apart(&f);
        assert_eq!(g.to_string(), "((exists x1. p(x1)) & exists x2. q(x2, y))");
        assert_eq!(g.free_vars(), f.free_vars());
    }
}
