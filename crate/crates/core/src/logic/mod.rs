//! Formulas of weighted second-order and fixed-point logic.

mod ast;
pub mod build;
mod check;
mod parse;
mod print;
mod subst;

pub use ast::{Arg, Closure, ConstLit, FixKind, Fixpoint, Formula, FreeVars};
pub use check::{
    check_fragment, check_well_formed, Fragment, FragmentViolation, SoArityMode, WellFormedError, WfOptions,
};
pub use parse::{parse_formula, ParseError};
pub use subst::{all_names, rename_apart, substitute, Fresh};

/// Rewrite into core syntax: `true`, `&`, `->`, `<->`, `forall` and the
/// guard are expanded; everything else is kept.
///
/// `β ? φ` becomes `(β (*) φ) (+) (!β (*) one)`.
pub fn desugar(f: &Formula) -> Formula {
    use Formula::*;
    let d = |g: &Formula| desugar(g);
    match f {
        False | Eq(..) | Less(..) | Rel(..) | So(..) | Const(_) => f.clone(),
        True => Formula::not(False),
        Not(g) => Formula::not(d(g)),
        Or(a, b) => Formula::or(d(a), d(b)),
        And(a, b) => Formula::not(Formula::or(Formula::not(d(a)), Formula::not(d(b)))),
        Implies(a, b) => Formula::or(Formula::not(d(a)), d(b)),
        Iff(a, b) => {
            let (a, b) = (d(a), d(b));
            let ab = Formula::or(Formula::not(a.clone()), b.clone());
            let ba = Formula::or(Formula::not(b), a);
            Formula::not(Formula::or(Formula::not(ab), Formula::not(ba)))
        }
        ExistsFo(x, g) => Formula::exists(x, d(g)),
        ForallFo(x, g) => Formula::not(Formula::exists(x, Formula::not(d(g)))),
        ExistsSo(x, k, g) => Formula::exists_so(x, *k, d(g)),
        Tc(c) => Tc(Closure { body: Box::new(d(&c.body)), ..c.clone() }),
        Dtc(c) => Dtc(Closure { body: Box::new(d(&c.body)), ..c.clone() }),
        Fix(k, p) => Fix(*k, Fixpoint { body: Box::new(d(&p.body)), ..p.clone() }),
        OPlus(a, b) => Formula::oplus(d(a), d(b)),
        OTimes(a, b) => Formula::otimes(d(a), d(b)),
        SumFo(x, g) => Formula::sum(x, d(g)),
        ProdFo(x, g) => Formula::prod(x, d(g)),
        SumSo(x, k, g) => Formula::sum_so(x, *k, d(g)),
        ProdSo(x, k, g) => Formula::prod_so(x, *k, d(g)),
        Guard(beta, phi) => {
            let beta = d(beta);
            Formula::oplus(
                Formula::otimes(beta.clone(), d(phi)),
                Formula::otimes(Formula::not(beta), Formula::one()),
            )
        }
    }
}

/// True if `f` uses only core constructs.
pub fn is_core(f: &Formula) -> bool {
    let mut ok = true;
    f.visit(&mut |g| {
        ok &= !matches!(
            g,
            Formula::True | Formula::And(..) | Formula::Implies(..) | Formula::Iff(..) | Formula::ForallFo(..)
                | Formula::Guard(..)
        )
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn desugar_examples() {
        assert_eq!(desugar(&Formula::True), Formula::not(Formula::False));
        assert_eq!(desugar(&p("p(x) ? c(2)")), p("((p(x) (*) c(2)) (+) (!p(x) (*) one))"));
        assert_eq!(desugar(&p("forall x. p(x)")), p("!exists x. !p(x)"));
    }

    #[test]
    fn desugar_is_idempotent_on_examples() {
        for s in ["(p(x) <-> q(x))", "forall x. (p(x) -> true)", "sum X:1. (X(x) ? c(3))"] {
            let once = desugar(&p(s));
            assert!(is_core(&once));
            assert_eq!(desugar(&once), once);
            assert_eq!(once.free_vars(), p(s).free_vars());
        }
    }

    #[test]
    fn free_vars_examples() {
        let clique = p("forall x. forall y. ((X(x) & X(y) & x != y) -> edge(x, y))");
        let fv = clique.free_vars();
        assert!(fv.fo.is_empty());
        assert_eq!(fv.so.keys().cloned().collect::<Vec<_>>(), vec!["X".to_string()]);
        assert!(p("sum x. r(x, y)").free_vars().fo.contains("y"));
        let closed = p("sum X:1. (forall x. X(x) (*) prod x. (c(0) (+) (c(1) (*) X(x))))");
        assert!(closed.is_sentence());
    }
}
