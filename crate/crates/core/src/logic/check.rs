use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::ast::{FixKind, Formula};
use crate::structures::Signature;

/// How second-order quantifiers may be typed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SoArityMode {
    /// Any arity `k >= 1`.
    #[default]
    ArityK,
    /// Quantified relation variables must be unary.
    Unary,
}

#[derive(Clone, Debug, Default)]
pub struct WfOptions {
    pub so_mode: SoArityMode,
    /// When false, the builtin `<` is rejected.
    pub ordered: bool,
    /// Relation symbols must be declared here with matching arity.
    pub signature: Option<Signature>,
}

impl WfOptions {
    pub fn ordered() -> Self {
        WfOptions { ordered: true, ..Default::default() }
    }

    pub fn with_signature(sig: &Signature) -> Self {
        WfOptions { ordered: true, signature: Some(sig.clone()), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("weighted subformula `{0}` inside a Boolean context")]
    WeightedInBoolean(String),
    #[error("`{name}` used with arity {found}, expected {expected}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("relation symbol `{0}` is not in the signature")]
    UnknownSymbol(String),
    #[error("`{rel}` occurs negatively in the body of `{fix}`")]
    NotPositive { rel: String, fix: String },
    #[error("second-order variable `{0}` must be unary in this mode")]
    NotUnary(String),
    #[error("`<` is not allowed over unordered structures: `{0}`")]
    OrderUsed(String),
    #[error("closure tuples and arguments disagree in `{0}`")]
    ClosureShape(String),
}

/// Check typing, arities, Boolean/weighted layering and fixed-point positivity.
pub fn check_well_formed(f: &Formula, opts: &WfOptions) -> Result<(), WellFormedError> {
    let mut wf = Wf { opts, rels: HashMap::new(), so_free: HashMap::new() };
    if let Some(sig) = &opts.signature {
        for (name, ar) in sig.iter() {
            wf.rels.insert(name.to_string(), ar);
        }
    }
    wf.go(f, false, &mut Vec::new())
}

struct Wf<'a> {
    opts: &'a WfOptions,
    rels: HashMap<String, usize>,
    so_free: HashMap<String, usize>,
}

impl Wf<'_> {
    fn arity(map: &mut HashMap<String, usize>, name: &str, found: usize) -> Result<(), WellFormedError> {
        match map.get(name) {
            Some(&expected) if expected != found => {
                Err(WellFormedError::Arity { name: name.to_string(), expected, found })
            }
            Some(_) => Ok(()),
            None => {
                map.insert(name.to_string(), found);
                Ok(())
            }
        }
    }

    fn go(&mut self, f: &Formula, boolean: bool, so: &mut Vec<(String, usize)>) -> Result<(), WellFormedError> {
        use Formula::*;
        if boolean && !f.is_boolean_node() {
            return Err(WellFormedError::WeightedInBoolean(f.to_string()));
        }
        match f {
            Less(..) if !self.opts.ordered => Err(WellFormedError::OrderUsed(f.to_string())),
            Rel(r, args) => {
                if self.opts.signature.is_some() && !self.rels.contains_key(r) {
                    return Err(WellFormedError::UnknownSymbol(r.clone()));
                }
                Self::arity(&mut self.rels, r, args.len())
            }
            So(x, args) => match so.iter().rev().find(|(n, _)| n == x) {
                Some((_, k)) if *k != args.len() => {
                    Err(WellFormedError::Arity { name: x.clone(), expected: *k, found: args.len() })
                }
                Some(_) => Ok(()),
                None => Self::arity(&mut self.so_free, x, args.len()),
            },
            ExistsSo(x, k, g) | SumSo(x, k, g) | ProdSo(x, k, g) => {
                if self.opts.so_mode == SoArityMode::Unary && *k != 1 {
                    return Err(WellFormedError::NotUnary(x.clone()));
                }
                so.push((x.clone(), *k));
                let r = self.go(g, boolean || matches!(f, ExistsSo(..)), so);
                so.pop();
                r
            }
            Tc(c) | Dtc(c) => {
                if c.from.len() != c.to.len() || c.args.len() != 2 * c.from.len() {
                    return Err(WellFormedError::ClosureShape(f.to_string()));
                }
                self.go(&c.body, true, so)
            }
            Fix(kind, p) => {
                if p.vars.len() != p.args.len() {
                    return Err(WellFormedError::ClosureShape(f.to_string()));
                }
                if matches!(kind, FixKind::Lfp | FixKind::Gfp) && !positive(&p.body, &p.rel, true) {
                    return Err(WellFormedError::NotPositive { rel: p.rel.clone(), fix: kind.keyword().into() });
                }
                so.push((p.rel.clone(), p.vars.len()));
                let r = self.go(&p.body, true, so);
                so.pop();
                r
            }
            Guard(beta, phi) => {
                self.go(beta, true, so)?;
                self.go(phi, boolean, so)
            }
            _ => {
                let inner = boolean || f.is_boolean_node();
                for c in f.children() {
                    self.go(c, inner, so)?;
                }
                Ok(())
            }
        }
    }
}

/// True if every free occurrence of `rel` in `f` has the given polarity.
fn positive(f: &Formula, rel: &str, pol: bool) -> bool {
    use Formula::*;
    match f {
        So(x, _) => x != rel || pol,
        Not(g) => positive(g, rel, !pol),
        Implies(a, b) => positive(a, rel, !pol) && positive(b, rel, pol),
        Iff(a, b) => {
            positive(a, rel, pol) && positive(a, rel, !pol) && positive(b, rel, pol) && positive(b, rel, !pol)
        }
        Guard(a, b) => {
            positive(a, rel, pol) && positive(a, rel, !pol) && positive(b, rel, pol)
        }
        ExistsSo(x, _, _) | SumSo(x, _, _) | ProdSo(x, _, _) if x == rel => true,
        Fix(_, p) if p.rel == rel => true,
        _ => f.children().into_iter().all(|c| positive(c, rel, pol)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    WFo,
    WSo,
    WEso,
    WLfp,
    WPfp,
    WDtc,
    WPfpSoq,
}

impl Fragment {
    pub const ALL: [Fragment; 7] = [
        Fragment::WFo,
        Fragment::WSo,
        Fragment::WEso,
        Fragment::WLfp,
        Fragment::WPfp,
        Fragment::WDtc,
        Fragment::WPfpSoq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::WFo => "wFO",
            Fragment::WSo => "wSO",
            Fragment::WEso => "wESO",
            Fragment::WLfp => "wLFP",
            Fragment::WPfp => "wPFP",
            Fragment::WDtc => "wDTC",
            Fragment::WPfpSoq => "wPFP+SOq",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fragment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fragment::ALL
            .into_iter()
            .find(|fr| fr.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown fragment `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not in {fragment}: {reason} in `{subterm}`")]
pub struct FragmentViolation {
    pub fragment: Fragment,
    pub subterm: String,
    pub reason: String,
}

/// Accept iff `f` lies syntactically in `fragment`; otherwise report the
/// first offending subterm in pre-order.
pub fn check_fragment(f: &Formula, fragment: Fragment) -> Result<(), FragmentViolation> {
    let mut body = f;
    if fragment == Fragment::WEso {
        while let Formula::SumSo(_, _, g) = body {
            body = g;
        }
    }
    let mut bad: Option<(String, String)> = None;
    body.visit(&mut |g| {
        if bad.is_some() {
            return;
        }
        if let Some(reason) = offends(g, fragment) {
            bad = Some((g.to_string(), reason));
        }
    });
    match bad {
        None => Ok(()),
        Some((subterm, reason)) => Err(FragmentViolation { fragment, subterm, reason }),
    }
}

fn offends(g: &Formula, fr: Fragment) -> Option<String> {
    use Formula::*;
    use Fragment::*;
    let so_quant = matches!(g, ExistsSo(..) | SumSo(..) | ProdSo(..));
    match g {
        _ if so_quant && matches!(fr, WFo | WLfp | WPfp | WDtc) => Some("second-order quantifier".into()),
        _ if so_quant && fr == WEso => Some("second-order quantifier outside the leading sum prefix".into()),
        Tc(_) if !matches!(fr, WLfp | WPfp | WPfpSoq) => Some("transitive closure".into()),
        Dtc(_) if !matches!(fr, WLfp | WPfp | WDtc | WPfpSoq) => Some("deterministic transitive closure".into()),
        Fix(FixKind::Pfp, _) if !matches!(fr, WPfp | WPfpSoq) => Some("partial fixed point".into()),
        Fix(k, _) if !matches!(fr, WLfp | WPfp | WPfpSoq) => Some(format!("{} fixed point", k.keyword())),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn weighted_inside_boolean_rejected() {
        let f = p("(p(x) & c(2))");
        assert!(matches!(
            check_well_formed(&f, &WfOptions::ordered()),
            Err(WellFormedError::WeightedInBoolean(_))
        ));
        assert!(check_well_formed(&p("(p(x) (*) c(2))"), &WfOptions::ordered()).is_ok());
        assert!(check_well_formed(&p("(c(2) ? one)"), &WfOptions::ordered()).is_err());
    }

    #[test]
    fn positivity() {
        let ok = p("[lfp R(x, y). (e(x, y) | exists z. (R(x, z) & e(z, y)))](a, b)");
        assert!(check_well_formed(&ok, &WfOptions::ordered()).is_ok());
        let bad = p("[lfp R(x). !R(x)](y)");
        assert!(matches!(check_well_formed(&bad, &WfOptions::ordered()), Err(WellFormedError::NotPositive { .. })));
        let bad2 = p("[gfp R(x). (R(x) -> p(x))](y)");
        assert!(check_well_formed(&bad2, &WfOptions::ordered()).is_err());
        let pfp = p("[pfp R(x). !R(x)](y)");
        assert!(check_well_formed(&pfp, &WfOptions::ordered()).is_ok());
    }

    #[test]
    fn arities_and_modes() {
        assert!(check_well_formed(&p("(e(x, y) & e(x))"), &WfOptions::ordered()).is_err());
        assert!(check_well_formed(&p("exists X:2. X(x)"), &WfOptions::ordered()).is_err());
        let f = p("exists X:2. X(x, y)");
        assert!(check_well_formed(&f, &WfOptions::ordered()).is_ok());
        let unary = WfOptions { so_mode: SoArityMode::Unary, ordered: true, signature: None };
        assert!(check_well_formed(&f, &unary).is_err());
        assert!(check_well_formed(&p("x < y"), &WfOptions::default()).is_err());
        let sig = Signature::parse("edge:2").unwrap();
        assert!(check_well_formed(&p("p(x)"), &WfOptions::with_signature(&sig)).is_err());
    }

    #[test]
    fn fragments() {
        let ex13 = p("sum X:1. ((forall x. forall y. ((X(x) & X(y) & x != y) -> edge(x, y))) (*) prod x. (c(0) (+) (c(1) (*) X(x))))");
        assert!(check_fragment(&ex13, Fragment::WEso).is_ok());
        assert!(check_fragment(&ex13, Fragment::WSo).is_ok());
        assert!(check_fragment(&ex13, Fragment::WFo).is_err());
        let pfp = p("sum X:1. [pfp R(x). !R(x)](y)");
        assert!(check_fragment(&pfp, Fragment::WEso).is_err());
        assert!(check_fragment(&pfp, Fragment::WPfpSoq).is_ok());
        let inner = p("(c(1) (*) sum X:1. X(x))");
        let err = check_fragment(&inner, Fragment::WEso).unwrap_err();
        assert_eq!(err.subterm, "sum X:1. X(x)");
        let dtc = p("[dtc (x) -> (y). e(x, y)](a, b)");
        assert!(check_fragment(&dtc, Fragment::WDtc).is_ok());
        assert!(check_fragment(&p("[tc (x) -> (y). e(x, y)](a, b)"), Fragment::WDtc).is_err());
        assert_eq!("wpfp+soq".parse::<Fragment>().unwrap(), Fragment::WPfpSoq);
    }
}
