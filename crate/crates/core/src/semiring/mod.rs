//! Semiring handles, exact values, and the term algebra.
//!
//! A [`Semiring`] is a runtime handle chosen by name from the registry. All
//! arithmetic is exact: naturals and integers are arbitrary precision,
//! rationals are exact fractions, and the ordered semirings adjoin a single
//! absorbing infinity.

mod literal;
pub mod sample;
pub mod term;
mod value;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use term::{build_sigma_pi, eval_term, Rows, Term, TermError};
pub use value::{radix_cmp, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemiringError {
    #[error("unknown semiring `{0}`")]
    UnknownName(String),
    #[error("int_mod requires a modulus >= 2")]
    MissingModulus,
    #[error("invalid modulus `{0}`; expected an integer >= 2")]
    BadModulus(String),
    #[error("unsupported t-norm `{0}`; only `product` is available")]
    UnsupportedTnorm(String),
    #[error("invalid alphabet `{0}`")]
    BadAlphabet(String),
    #[error("semiring `{semiring}` does not take parameter `{param}`")]
    UnexpectedParam { semiring: String, param: String },
    #[error("invalid literal `{literal}` for semiring `{semiring}`: {reason}")]
    BadLiteral { semiring: String, literal: String, reason: String },
}

/// Every name accepted by [`registry_lookup`].
pub const REGISTERED: &[&str] = &[
    "bool",
    "nat",
    "nat_inf",
    "int",
    "int_mod",
    "rat",
    "arctic",
    "nat_max",
    "trop",
    "nat_min",
    "tnorm_product",
    "langs",
    "multiset",
    "radix_max",
    "radix_min",
];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Bool,
    Nat,
    NatInf,
    Int,
    IntMod(u64),
    Rat,
    Arctic,
    NatMax,
    Trop,
    NatMin,
    TnormProduct,
    Langs(Option<BTreeSet<char>>),
    Multiset(Option<BTreeSet<char>>),
    RadixMax,
    RadixMin,
}

/// Optional registry parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub modulus: Option<u64>,
    pub alphabet: Option<String>,
    pub tnorm: Option<String>,
}

/// A named semiring with exact arithmetic over [`Value`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Semiring {
    kind: Kind,
}

/// Look up a registered semiring by name.
pub fn registry_lookup(name: &str, params: &Params) -> Result<Semiring, SemiringError> {
    let reject = |param: &str| SemiringError::UnexpectedParam {
        semiring: name.to_string(),
        param: param.to_string(),
    };
    let alphabet = match &params.alphabet {
        None => None,
        Some(a) => {
            let set: BTreeSet<char> = a.chars().collect();
            if set.is_empty() || set.iter().any(|c| !c.is_alphanumeric()) {
                return Err(SemiringError::BadAlphabet(a.clone()));
            }
            Some(set)
        }
    };
    if params.modulus.is_some() && name != "int_mod" {
        return Err(reject("modulus"));
    }
    if alphabet.is_some() && !matches!(name, "langs" | "multiset") {
        return Err(reject("alphabet"));
    }
    if params.tnorm.is_some() && name != "tnorm_product" {
        return Err(reject("tnorm"));
    }
    let kind = match name {
        "bool" => Kind::Bool,
        "nat" => Kind::Nat,
        "nat_inf" => Kind::NatInf,
        "int" => Kind::Int,
        "int_mod" => match params.modulus {
            Some(q) if q >= 2 => Kind::IntMod(q),
            Some(q) => return Err(SemiringError::BadModulus(q.to_string())),
            None => return Err(SemiringError::MissingModulus),
        },
        "rat" => Kind::Rat,
        "arctic" => Kind::Arctic,
        "nat_max" => Kind::NatMax,
        "trop" => Kind::Trop,
        "nat_min" => Kind::NatMin,
        "tnorm_product" => match params.tnorm.as_deref() {
            None | Some("product") => Kind::TnormProduct,
            Some(other) => return Err(SemiringError::UnsupportedTnorm(other.to_string())),
        },
        "langs" => Kind::Langs(alphabet),
        "multiset" => Kind::Multiset(alphabet),
        "radix_max" => Kind::RadixMax,
        "radix_min" => Kind::RadixMin,
        other => return Err(SemiringError::UnknownName(other.to_string())),
    };
    Ok(Semiring { kind })
}

impl std::str::FromStr for Semiring {
    type Err = SemiringError;

    /// Parses `name` or `name:param`, e.g. `int_mod:3` or `langs:ab`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (spec.trim(), None),
        };
        let mut params = Params::default();
        if let Some(p) = param {
            match name {
                "int_mod" => {
                    params.modulus =
                        Some(p.parse().map_err(|_| SemiringError::BadModulus(p.to_string()))?)
                }
                "langs" | "multiset" => params.alphabet = Some(p.to_string()),
                "tnorm_product" => params.tnorm = Some(p.to_string()),
                _ => {
                    return Err(SemiringError::UnexpectedParam {
                        semiring: name.to_string(),
                        param: p.to_string(),
                    })
                }
            }
        }
        registry_lookup(name, &params)
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match &self.kind {
            Kind::IntMod(q) => write!(f, ":{q}"),
            Kind::Langs(Some(a)) | Kind::Multiset(Some(a)) => {
                write!(f, ":{}", a.iter().collect::<String>())
            }
            _ => Ok(()),
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn concat_all(xs: &BTreeSet<String>, ys: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for x in xs {
        for y in ys {
            out.insert(format!("{x}{y}"));
        }
    }
    out
}

impl Semiring {
    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Bool => "bool",
            Kind::Nat => "nat",
            Kind::NatInf => "nat_inf",
            Kind::Int => "int",
            Kind::IntMod(_) => "int_mod",
            Kind::Rat => "rat",
            Kind::Arctic => "arctic",
            Kind::NatMax => "nat_max",
            Kind::Trop => "trop",
            Kind::NatMin => "nat_min",
            Kind::TnormProduct => "tnorm_product",
            Kind::Langs(_) => "langs",
            Kind::Multiset(_) => "multiset",
            Kind::RadixMax => "radix_max",
            Kind::RadixMin => "radix_min",
        }
    }

    /// Short description of the carrier and operations.
    pub fn describe(&self) -> &'static str {
        match self.kind {
            Kind::Bool => "Boolean semiring <{0,1}, or, and, 0, 1>",
            Kind::Nat => "natural numbers <N, +, *, 0, 1>",
            Kind::NatInf => "extended naturals <N u {+inf}, +, *, 0, 1> with 0 * inf = 0",
            Kind::Int => "ring of integers",
            Kind::IntMod(_) => "integers modulo q",
            Kind::Rat => "field of rationals",
            Kind::Arctic => "arctic <Q+ u {-inf}, max, +, -inf, 0>",
            Kind::NatMax => "max-plus naturals <N u {-inf}, max, +, -inf, 0>",
            Kind::Trop => "tropical <Q+ u {+inf}, min, +, +inf, 0>",
            Kind::NatMin => "min-plus naturals <N u {+inf}, min, +, +inf, 0>",
            Kind::TnormProduct => "product t-norm <[0,1] n Q, max, *, 0, 1>",
            Kind::Langs(_) => "finite languages <union, concatenation, {}, {eps}>",
            Kind::Multiset(_) => "multisets of words N<S*>, pointwise sum, convolution",
            Kind::RadixMax => "words u {-inf}, radix max, concatenation",
            Kind::RadixMin => "words u {+inf}, radix min, concatenation",
        }
    }

    pub fn is_commutative(&self) -> bool {
        !matches!(
            self.kind,
            Kind::Langs(_) | Kind::Multiset(_) | Kind::RadixMax | Kind::RadixMin
        )
    }

    pub fn is_idempotent(&self) -> bool {
        matches!(
            self.kind,
            Kind::Bool
                | Kind::Arctic
                | Kind::NatMax
                | Kind::Trop
                | Kind::NatMin
                | Kind::TnormProduct
                | Kind::Langs(_)
                | Kind::RadixMax
                | Kind::RadixMin
        )
    }

    pub fn zero(&self) -> Value {
        match self.kind {
            Kind::Bool => Value::Bool(false),
            Kind::Nat => Value::Nat(BigUint::zero()),
            Kind::NatInf => Value::ExtNat(Some(BigUint::zero())),
            Kind::Int => Value::Int(BigInt::zero()),
            Kind::IntMod(_) => Value::Residue(0),
            Kind::Rat | Kind::TnormProduct => Value::Rat(BigRational::zero()),
            Kind::Arctic | Kind::NatMax => Value::MaxPlus(None),
            Kind::Trop | Kind::NatMin => Value::MinPlus(None),
            Kind::Langs(_) => Value::Lang(BTreeSet::new()),
            Kind::Multiset(_) => Value::Multiset(BTreeMap::new()),
            Kind::RadixMax => Value::RadixMax(None),
            Kind::RadixMin => Value::RadixMin(None),
        }
    }

    pub fn one(&self) -> Value {
        match self.kind {
            Kind::Bool => Value::Bool(true),
            Kind::Nat => Value::Nat(BigUint::one()),
            Kind::NatInf => Value::ExtNat(Some(BigUint::one())),
            Kind::Int => Value::Int(BigInt::one()),
            Kind::IntMod(_) => Value::Residue(1),
            Kind::Rat | Kind::TnormProduct => Value::Rat(BigRational::one()),
            Kind::Arctic | Kind::NatMax => Value::MaxPlus(Some(rat(0))),
            Kind::Trop | Kind::NatMin => Value::MinPlus(Some(rat(0))),
            Kind::Langs(_) => Value::Lang(BTreeSet::from([String::new()])),
            Kind::Multiset(_) => Value::Multiset(BTreeMap::from([(String::new(), BigUint::one())])),
            Kind::RadixMax => Value::RadixMax(Some(String::new())),
            Kind::RadixMin => Value::RadixMin(Some(String::new())),
        }
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        *v == self.zero()
    }

    /// `𝟙` if `b`, else `𝟘`.
    pub fn from_bool(&self, b: bool) -> Value {
        if b {
            self.one()
        } else {
            self.zero()
        }
    }

    /// True if `v` lies in this semiring's carrier.
    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (Kind::Bool, Value::Bool(_))
            | (Kind::Nat, Value::Nat(_))
            | (Kind::NatInf, Value::ExtNat(_))
            | (Kind::Int, Value::Int(_))
            | (Kind::Rat, Value::Rat(_)) => true,
            (Kind::IntMod(q), Value::Residue(r)) => r < q,
            (Kind::Arctic, Value::MaxPlus(x)) | (Kind::Trop, Value::MinPlus(x)) => {
                x.as_ref().is_none_or(|x| !x.is_negative())
            }
            (Kind::NatMax, Value::MaxPlus(x)) | (Kind::NatMin, Value::MinPlus(x)) => x
                .as_ref()
                .is_none_or(|x| x.is_integer() && !x.is_negative()),
            (Kind::TnormProduct, Value::Rat(r)) => !r.is_negative() && *r <= BigRational::one(),
            (Kind::Langs(a), Value::Lang(ws)) => ws.iter().all(|w| literal::word_ok(a, w)),
            (Kind::Multiset(a), Value::Multiset(m)) => {
                m.iter().all(|(w, c)| literal::word_ok(a, w) && !c.is_zero())
            }
            (Kind::RadixMax, Value::RadixMax(w)) | (Kind::RadixMin, Value::RadixMin(w)) => w
                .as_ref()
                .is_none_or(|w| w.chars().all(|c| c == '0' || c == '1')),
            _ => false,
        }
    }

    fn mismatch(&self, a: &Value, b: &Value) -> ! {
        panic!("values {a:?} and {b:?} are not both in semiring {self}")
    }

    pub fn add(&self, a: &Value, b: &Value) -> Value {
        match (&self.kind, a, b) {
            (Kind::Bool, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (Kind::Nat, Value::Nat(x), Value::Nat(y)) => Value::Nat(x + y),
            (Kind::NatInf, Value::ExtNat(x), Value::ExtNat(y)) => Value::ExtNat(match (x, y) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            }),
            (Kind::Int, Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (Kind::IntMod(q), Value::Residue(x), Value::Residue(y)) => {
                Value::Residue(((*x as u128 + *y as u128) % *q as u128) as u64)
            }
            (Kind::Rat, Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
            (Kind::TnormProduct, Value::Rat(x), Value::Rat(y)) => Value::Rat(x.max(y).clone()),
            (Kind::Arctic | Kind::NatMax, Value::MaxPlus(x), Value::MaxPlus(y)) => {
                Value::MaxPlus(match (x, y) {
                    (None, v) | (v, None) => v.clone(),
                    (Some(x), Some(y)) => Some(x.max(y).clone()),
                })
            }
            (Kind::Trop | Kind::NatMin, Value::MinPlus(x), Value::MinPlus(y)) => {
                Value::MinPlus(match (x, y) {
                    (None, v) | (v, None) => v.clone(),
                    (Some(x), Some(y)) => Some(x.min(y).clone()),
                })
            }
            (Kind::Langs(_), Value::Lang(x), Value::Lang(y)) => {
                Value::Lang(x.union(y).cloned().collect())
            }
            (Kind::Multiset(_), Value::Multiset(x), Value::Multiset(y)) => {
                let mut out = x.clone();
                for (w, c) in y {
                    *out.entry(w.clone()).or_default() += c;
                }
                Value::Multiset(out)
            }
            (Kind::RadixMax, Value::RadixMax(x), Value::RadixMax(y)) => {
                Value::RadixMax(match (x, y) {
                    (None, v) | (v, None) => v.clone(),
                    (Some(x), Some(y)) => Some(match radix_cmp(x, y) {
                        Ordering::Less => y.clone(),
                        _ => x.clone(),
                    }),
                })
            }
            (Kind::RadixMin, Value::RadixMin(x), Value::RadixMin(y)) => {
                Value::RadixMin(match (x, y) {
                    (None, v) | (v, None) => v.clone(),
                    (Some(x), Some(y)) => Some(match radix_cmp(x, y) {
                        Ordering::Greater => y.clone(),
                        _ => x.clone(),
                    }),
                })
            }
            _ => self.mismatch(a, b),
        }
    }

    pub fn mul(&self, a: &Value, b: &Value) -> Value {
        match (&self.kind, a, b) {
            (Kind::Bool, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            (Kind::Nat, Value::Nat(x), Value::Nat(y)) => Value::Nat(x * y),
            (Kind::NatInf, Value::ExtNat(x), Value::ExtNat(y)) => {
                let is_zero = |v: &Option<BigUint>| v.as_ref().is_some_and(|v| v.is_zero());
                Value::ExtNat(if is_zero(x) || is_zero(y) {
                    Some(BigUint::zero())
                } else {
                    match (x, y) {
                        (Some(x), Some(y)) => Some(x * y),
                        _ => None,
                    }
                })
            }
            (Kind::Int, Value::Int(x), Value::Int(y)) => Value::Int(x * y),
            (Kind::IntMod(q), Value::Residue(x), Value::Residue(y)) => {
                Value::Residue(((*x as u128 * *y as u128) % *q as u128) as u64)
            }
            (Kind::Rat | Kind::TnormProduct, Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
            (Kind::Arctic | Kind::NatMax, Value::MaxPlus(x), Value::MaxPlus(y)) => {
                Value::MaxPlus(match (x, y) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                })
            }
            (Kind::Trop | Kind::NatMin, Value::MinPlus(x), Value::MinPlus(y)) => {
                Value::MinPlus(match (x, y) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                })
            }
            (Kind::Langs(_), Value::Lang(x), Value::Lang(y)) => Value::Lang(concat_all(x, y)),
            (Kind::Multiset(_), Value::Multiset(x), Value::Multiset(y)) => {
                let mut out: BTreeMap<String, BigUint> = BTreeMap::new();
                for (u, c) in x {
                    for (v, d) in y {
                        *out.entry(format!("{u}{v}")).or_default() += c * d;
                    }
                }
                Value::Multiset(out)
            }
            (Kind::RadixMax, Value::RadixMax(x), Value::RadixMax(y)) => {
                Value::RadixMax(match (x, y) {
                    (Some(x), Some(y)) => Some(format!("{x}{y}")),
                    _ => None,
                })
            }
            (Kind::RadixMin, Value::RadixMin(x), Value::RadixMin(y)) => {
                Value::RadixMin(match (x, y) {
                    (Some(x), Some(y)) => Some(format!("{x}{y}")),
                    _ => None,
                })
            }
            _ => self.mismatch(a, b),
        }
    }

    /// Sum of an iterator of values (𝟘 when empty).
    pub fn sum<'a>(&self, it: impl IntoIterator<Item = &'a Value>) -> Value {
        it.into_iter().fold(self.zero(), |acc, v| self.add(&acc, v))
    }

    /// Left-to-right product of an iterator of values (𝟙 when empty).
    pub fn product<'a>(&self, it: impl IntoIterator<Item = &'a Value>) -> Value {
        it.into_iter().fold(self.one(), |acc, v| self.mul(&acc, v))
    }

    /// Parse a literal in this semiring's syntax.
    pub fn parse_literal(&self, text: &str) -> Result<Value, SemiringError> {
        literal::parse(self, text.trim()).map_err(|reason| SemiringError::BadLiteral {
            semiring: self.to_string(),
            literal: text.to_string(),
            reason,
        })
    }

    /// Print a value so that [`Semiring::parse_literal`] reads it back.
    pub fn format(&self, v: &Value) -> String {
        v.to_string()
    }
}

/// All registered semirings with their default parameters (`int_mod` uses q = 2).
pub fn all_instances() -> Vec<Semiring> {
    REGISTERED
        .iter()
        .map(|name| {
            let params = Params {
                modulus: (*name == "int_mod").then_some(2),
                ..Params::default()
            };
            registry_lookup(name, &params).expect("registered name")
        })
        .collect()
}
