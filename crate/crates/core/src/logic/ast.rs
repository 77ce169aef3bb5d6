use std::collections::{BTreeMap, BTreeSet};

/// Argument of a closure or fixed-point application: a variable or a
/// numeral naming an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Elem(usize),
}

/// Weighted constant; `Zero` and `One` are the units of whatever semiring
/// the formula is evaluated in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstLit {
    Zero,
    One,
    Lit(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixKind {
    Lfp,
    Gfp,
    Ifp,
    Pfp,
}

impl FixKind {
    pub fn keyword(self) -> &'static str {
        match self {
            FixKind::Lfp => "lfp",
            FixKind::Gfp => "gfp",
            FixKind::Ifp => "ifp",
            FixKind::Pfp => "pfp",
        }
    }
}

/// `[tc (from) -> (to). body](args)`; `args` holds the source tuple then the target tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Closure {
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub body: Box<Formula>,
    pub args: Vec<Arg>,
}

/// `[lfp rel(vars). body](args)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fixpoint {
    pub rel: String,
    pub vars: Vec<String>,
    pub body: Box<Formula>,
    pub args: Vec<Arg>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    False,
    True,
    Eq(String, String),
    Less(String, String),
    Rel(String, Vec<String>),
    So(String, Vec<String>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ExistsFo(String, Box<Formula>),
    ForallFo(String, Box<Formula>),
    ExistsSo(String, usize, Box<Formula>),
    Tc(Closure),
    Dtc(Closure),
    Fix(FixKind, Fixpoint),
    Const(ConstLit),
    OPlus(Box<Formula>, Box<Formula>),
    OTimes(Box<Formula>, Box<Formula>),
    SumFo(String, Box<Formula>),
    ProdFo(String, Box<Formula>),
    SumSo(String, usize, Box<Formula>),
    ProdSo(String, usize, Box<Formula>),
    /// `β ? φ`: φ where β holds, 𝟙 elsewhere.
    Guard(Box<Formula>, Box<Formula>),
}

/// Free variables, split by order. Second-order variables carry their arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub fo: BTreeSet<String>,
    pub so: BTreeMap<String, usize>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.fo.is_empty() && self.so.is_empty()
    }
}

fn b(f: Formula) -> Box<Formula> {
    Box::new(f)
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(b(f))
    }
    pub fn or(x: Formula, y: Formula) -> Formula {
        Formula::Or(b(x), b(y))
    }
    pub fn and(x: Formula, y: Formula) -> Formula {
        Formula::And(b(x), b(y))
    }
    pub fn implies(x: Formula, y: Formula) -> Formula {
        Formula::Implies(b(x), b(y))
    }
    pub fn iff(x: Formula, y: Formula) -> Formula {
        Formula::Iff(b(x), b(y))
    }
    pub fn oplus(x: Formula, y: Formula) -> Formula {
        Formula::OPlus(b(x), b(y))
    }
    pub fn otimes(x: Formula, y: Formula) -> Formula {
        Formula::OTimes(b(x), b(y))
    }
    pub fn guard(beta: Formula, phi: Formula) -> Formula {
        Formula::Guard(b(beta), b(phi))
    }
    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::ExistsFo(x.into(), b(f))
    }
    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::ForallFo(x.into(), b(f))
    }
    pub fn exists_so(x: &str, k: usize, f: Formula) -> Formula {
        Formula::ExistsSo(x.into(), k, b(f))
    }
    pub fn sum(x: &str, f: Formula) -> Formula {
        Formula::SumFo(x.into(), b(f))
    }
    pub fn prod(x: &str, f: Formula) -> Formula {
        Formula::ProdFo(x.into(), b(f))
    }
    pub fn sum_so(x: &str, k: usize, f: Formula) -> Formula {
        Formula::SumSo(x.into(), k, b(f))
    }
    pub fn prod_so(x: &str, k: usize, f: Formula) -> Formula {
        Formula::ProdSo(x.into(), k, b(f))
    }
    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.into(), y.into())
    }
    pub fn less(x: &str, y: &str) -> Formula {
        Formula::Less(x.into(), y.into())
    }
    pub fn rel(r: &str, args: &[&str]) -> Formula {
        Formula::Rel(r.into(), args.iter().map(|a| a.to_string()).collect())
    }
    pub fn so(x: &str, args: &[&str]) -> Formula {
        Formula::So(x.into(), args.iter().map(|a| a.to_string()).collect())
    }
    pub fn lit(text: &str) -> Formula {
        Formula::Const(ConstLit::Lit(text.into()))
    }
    pub fn one() -> Formula {
        Formula::Const(ConstLit::One)
    }
    pub fn zero() -> Formula {
        Formula::Const(ConstLit::Zero)
    }

    /// Conjunction of all items, `true` when empty.
    pub fn big_and(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Disjunction of all items, `false` when empty.
    pub fn big_or(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// `⊕` of all items, `zero` when empty.
    pub fn big_oplus(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::oplus).unwrap_or_else(Formula::zero)
    }

    /// `⊗` of all items in order, `one` when empty.
    pub fn big_otimes(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::otimes).unwrap_or_else(Formula::one)
    }

    /// True for node kinds of the Boolean grammar.
    pub fn is_boolean_node(&self) -> bool {
        !matches!(
            self,
            Formula::Const(_)
                | Formula::OPlus(..)
                | Formula::OTimes(..)
                | Formula::SumFo(..)
                | Formula::ProdFo(..)
                | Formula::SumSo(..)
                | Formula::ProdSo(..)
                | Formula::Guard(..)
        )
    }

    /// True if no weighted node occurs anywhere.
    pub fn is_boolean(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| ok &= f.is_boolean_node());
        ok
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            False | True | Eq(..) | Less(..) | Rel(..) | So(..) | Const(_) => vec![],
            Not(f) | ExistsFo(_, f) | ForallFo(_, f) | ExistsSo(_, _, f) | SumFo(_, f) | ProdFo(_, f)
            | SumSo(_, _, f) | ProdSo(_, _, f) => vec![f],
            Or(x, y) | And(x, y) | Implies(x, y) | Iff(x, y) | OPlus(x, y) | OTimes(x, y)
            | Guard(x, y) => vec![x, y],
            Tc(c) | Dtc(c) => vec![&c.body],
            Fix(_, p) => vec![&p.body],
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Free first- and second-order variables.
    ///
    /// Relation variables bound by a fixed point are second-order variables
    /// inside its body.
    pub fn free_vars(&self) -> FreeVars {
        let mut out = FreeVars::default();
        free(self, &mut Vec::new(), &mut Vec::new(), &mut out);
        out
    }

    /// True if the formula has no free variables.
    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Relation symbols with the arity of their (first) use.
    pub fn relation_symbols(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Rel(r, args) = f {
                out.entry(r.clone()).or_insert(args.len());
            }
        });
        out
    }
}

fn free(f: &Formula, fo: &mut Vec<String>, so: &mut Vec<String>, out: &mut FreeVars) {
    use Formula::*;
    let use_fo = |x: &String, fo: &Vec<String>, out: &mut FreeVars| {
        if !fo.contains(x) {
            out.fo.insert(x.clone());
        }
    };
    match f {
        False | True | Const(_) => {}
        Eq(x, y) | Less(x, y) => {
            use_fo(x, fo, out);
            use_fo(y, fo, out);
        }
        Rel(_, args) => args.iter().for_each(|a| use_fo(a, fo, out)),
        So(x, args) => {
            args.iter().for_each(|a| use_fo(a, fo, out));
            if !so.contains(x) {
                out.so.entry(x.clone()).or_insert(args.len());
            }
        }
        ExistsFo(x, g) | ForallFo(x, g) | SumFo(x, g) | ProdFo(x, g) => {
            fo.push(x.clone());
            free(g, fo, so, out);
            fo.pop();
        }
        ExistsSo(x, _, g) | SumSo(x, _, g) | ProdSo(x, _, g) => {
            so.push(x.clone());
            free(g, fo, so, out);
            so.pop();
        }
        Tc(c) | Dtc(c) => {
            for a in &c.args {
                if let Arg::Var(v) = a {
                    use_fo(v, fo, out);
                }
            }
            let n = fo.len();
            fo.extend(c.from.iter().cloned());
            fo.extend(c.to.iter().cloned());
            free(&c.body, fo, so, out);
            fo.truncate(n);
        }
        Fix(_, p) => {
            for a in &p.args {
                if let Arg::Var(v) = a {
                    use_fo(v, fo, out);
                }
            }
            let n = fo.len();
            fo.extend(p.vars.iter().cloned());
            so.push(p.rel.clone());
            free(&p.body, fo, so, out);
            so.pop();
            fo.truncate(n);
        }
        _ => {
            for c in f.children() {
                free(c, fo, so, out);
            }
        }
    }
}
