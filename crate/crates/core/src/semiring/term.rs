//! The term algebra T(G) over generators G and the ΣΠ normal form.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Semiring, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Gen(String),
    Zero,
    One,
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("generator `{0}` has no value")]
    Unresolved(String),
    #[error("value for generator `{0}` is not in the semiring")]
    ForeignValue(String),
    #[error("ragged nesting: {0}")]
    Ragged(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Gen(g) => f.write_str(g),
            Term::Zero => f.write_str("𝟘"),
            Term::One => f.write_str("𝟙"),
            Term::Plus(a, b) => write!(f, "({a} + {b})"),
            Term::Times(a, b) => write!(f, "({a} · {b})"),
        }
    }
}

impl Term {
    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Box::new(a), Box::new(b))
    }
}

/// Fold a term bottom-up in `sr`, reading generators from `assign`.
pub fn eval_term(t: &Term, sr: &Semiring, assign: &BTreeMap<String, Value>) -> Result<Value, TermError> {
    Ok(match t {
        Term::Gen(g) => {
            let v = assign.get(g).ok_or_else(|| TermError::Unresolved(g.clone()))?;
            if !sr.contains(v) {
                return Err(TermError::ForeignValue(g.clone()));
            }
            v.clone()
        }
        Term::Zero => sr.zero(),
        Term::One => sr.one(),
        Term::Plus(a, b) => sr.add(&eval_term(a, sr, assign)?, &eval_term(b, sr, assign)?),
        Term::Times(a, b) => sr.mul(&eval_term(a, sr, assign)?, &eval_term(b, sr, assign)?),
    })
}

/// Nested rows: lists alternate between sums (even depth) and products (odd depth).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rows {
    Leaf(String),
    List(Vec<Rows>),
}

impl Rows {
    pub fn leaf(g: &str) -> Rows {
        Rows::Leaf(g.to_string())
    }
}

/// Build the ΣΠ…ΣΠ term for rows nested exactly `2k` deep.
///
/// Depth 0 is a sum over its items, depth 1 a product, and so on; leaves
/// must sit at depth `2k`. Empty sums are 𝟘 and empty products 𝟙.
pub fn build_sigma_pi(rows: &Rows, k: usize) -> Result<Term, TermError> {
    if k == 0 {
        return Err(TermError::Ragged("alternation bound k must be at least 1".into()));
    }
    build(rows, 0, 2 * k)
}

fn build(rows: &Rows, depth: usize, leaf_depth: usize) -> Result<Term, TermError> {
    match rows {
        Rows::Leaf(g) if depth == leaf_depth => Ok(Term::Gen(g.clone())),
        Rows::Leaf(g) => Err(TermError::Ragged(format!(
            "generator `{g}` at depth {depth}, expected {leaf_depth}"
        ))),
        Rows::List(_) if depth == leaf_depth => {
            Err(TermError::Ragged(format!("list nested deeper than {leaf_depth}")))
        }
        Rows::List(items) => {
            let sum = depth % 2 == 0;
            let mut acc: Option<Term> = None;
            for item in items {
                let t = build(item, depth + 1, leaf_depth)?;
                acc = Some(match acc {
                    None => t,
                    Some(a) if sum => Term::plus(a, t),
                    Some(a) => Term::times(a, t),
                });
            }
            Ok(acc.unwrap_or(if sum { Term::Zero } else { Term::One }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Semiring {
        "nat".parse().unwrap()
    }

    fn list(items: Vec<Rows>) -> Rows {
        Rows::List(items)
    }

    #[test]
    fn one_times_one_plus_one() {
        let t = Term::times(Term::One, Term::plus(Term::One, Term::One));
        assert_eq!(eval_term(&t, &nat(), &BTreeMap::new()).unwrap(), Value::Nat(2u32.into()));
    }

    #[test]
    fn sum_of_products_of_ones() {
        let rows = list(vec![list(vec![Rows::leaf("u"), Rows::leaf("u")]); 2]);
        let t = build_sigma_pi(&rows, 1).unwrap();
        let assign = BTreeMap::from([("u".to_string(), Value::Nat(1u32.into()))]);
        assert_eq!(eval_term(&t, &nat(), &assign).unwrap(), Value::Nat(2u32.into()));
    }

    #[test]
    fn depth_one_shapes() {
        let t = build_sigma_pi(&list(vec![list(vec![Rows::leaf("a")]), list(vec![Rows::leaf("b")])]), 1)
            .unwrap();
        assert_eq!(t, Term::plus(Term::Gen("a".into()), Term::Gen("b".into())));
        let t = build_sigma_pi(&list(vec![list(vec![Rows::leaf("a"), Rows::leaf("b")])]), 1).unwrap();
        assert_eq!(t, Term::times(Term::Gen("a".into()), Term::Gen("b".into())));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(build_sigma_pi(&list(vec![Rows::leaf("a")]), 1).is_err());
        let deep = list(vec![list(vec![list(vec![Rows::leaf("a")])])]);
        assert!(build_sigma_pi(&deep, 1).is_err());
    }

    #[test]
    fn bool_plus_with_one_is_one() {
        let b: Semiring = "bool".parse().unwrap();
        let t = Term::plus(Term::Gen("g".into()), Term::plus(Term::One, Term::Zero));
        let assign = BTreeMap::from([("g".to_string(), Value::Bool(false))]);
        assert_eq!(eval_term(&t, &b, &assign).unwrap(), b.one());
    }

    #[test]
    fn unresolved_generator() {
        assert_eq!(
            eval_term(&Term::Gen("z".into()), &nat(), &BTreeMap::new()),
            Err(TermError::Unresolved("z".into()))
        );
    }
}
