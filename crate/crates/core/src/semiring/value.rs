use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// An element of one of the registered semirings.
///
/// The variant identifies the carrier; several semirings share a carrier
/// (`rat` and `tnorm_product`, `arctic` and `nat_max`, ...). Infinite
/// elements are encoded as `None` in the extended carriers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Nat(BigUint),
    /// `None` is `+inf`.
    ExtNat(Option<BigUint>),
    Int(BigInt),
    Residue(u64),
    Rat(BigRational),
    /// Max-plus carrier; `None` is `-inf`.
    MaxPlus(Option<BigRational>),
    /// Min-plus carrier; `None` is `+inf`.
    MinPlus(Option<BigRational>),
    Lang(BTreeSet<String>),
    Multiset(BTreeMap<String, BigUint>),
    /// Words under the radix order; `None` is `-inf`.
    RadixMax(Option<String>),
    /// Words under the radix order; `None` is `+inf`.
    RadixMin(Option<String>),
}

pub(crate) const EPSILON: &str = "ε";

fn word(w: &str) -> &str {
    if w.is_empty() {
        EPSILON
    } else {
        w
    }
}

pub(crate) fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", u8::from(*b)),
            Value::Nat(n) => write!(f, "{n}"),
            Value::ExtNat(Some(n)) => write!(f, "{n}"),
            Value::ExtNat(None) => f.write_str("+inf"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Residue(r) => write!(f, "{r}"),
            Value::Rat(r) => f.write_str(&fmt_rat(r)),
            Value::MaxPlus(Some(r)) | Value::MinPlus(Some(r)) => f.write_str(&fmt_rat(r)),
            Value::MaxPlus(None) => f.write_str("-inf"),
            Value::MinPlus(None) => f.write_str("+inf"),
            Value::Lang(ws) => {
                let parts: Vec<&str> = ws.iter().map(|w| word(w)).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            Value::Multiset(m) => {
                let parts: Vec<String> = m.iter().map(|(w, c)| format!("{}:{c}", word(w))).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            Value::RadixMax(Some(w)) | Value::RadixMin(Some(w)) => f.write_str(word(w)),
            Value::RadixMax(None) => f.write_str("-inf"),
            Value::RadixMin(None) => f.write_str("+inf"),
        }
    }
}

/// Radix order on words: shorter first, then lexicographic.
pub fn radix_cmp(x: &str, y: &str) -> std::cmp::Ordering {
    x.chars().count().cmp(&y.chars().count()).then_with(|| x.cmp(y))
}

impl Value {
    /// True for the additive identity of the carrier.
    pub fn is_zero_like(&self) -> bool {
        match self {
            Value::Bool(b) => !b,
            Value::Nat(n) => n.is_zero(),
            Value::ExtNat(n) => n.as_ref().is_some_and(|n| n.is_zero()),
            Value::Int(i) => i.is_zero(),
            Value::Residue(r) => *r == 0,
            Value::Rat(r) => r.is_zero(),
            Value::MaxPlus(v) | Value::MinPlus(v) => v.is_none(),
            Value::Lang(ws) => ws.is_empty(),
            Value::Multiset(m) => m.is_empty(),
            Value::RadixMax(w) | Value::RadixMin(w) => w.is_none(),
        }
    }
}
