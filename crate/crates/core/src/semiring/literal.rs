//! Literal syntax for every registered carrier.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::value::EPSILON;
use super::{Kind, Semiring, Value};

fn nat(t: &str) -> Result<BigUint, String> {
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err("expected a natural number".into());
    }
    t.parse().map_err(|_| "expected a natural number".into())
}

fn int(t: &str) -> Result<BigInt, String> {
    let digits = t.strip_prefix('-').unwrap_or(t);
    nat(digits).map_err(|_| "expected an integer".to_string())?;
    t.parse().map_err(|_| "expected an integer".into())
}

fn rational(t: &str) -> Result<BigRational, String> {
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(int(t)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(int(p)?, q))
        }
    }
}

fn nonneg(t: &str) -> Result<BigRational, String> {
    let r = rational(t)?;
    if r.is_negative() {
        return Err("carrier holds only non-negative rationals".into());
    }
    Ok(r)
}

fn nonneg_int(t: &str) -> Result<BigRational, String> {
    Ok(BigRational::from_integer(BigInt::from(nat(t)?)))
}

pub(super) fn word_ok(alphabet: &Option<BTreeSet<char>>, w: &str) -> bool {
    match alphabet {
        Some(a) => w.chars().all(|c| a.contains(&c)),
        None => w.chars().all(char::is_alphanumeric),
    }
}

fn parse_word(alphabet: &Option<BTreeSet<char>>, t: &str) -> Result<String, String> {
    let w = if t == EPSILON { "" } else { t };
    if !word_ok(alphabet, w) {
        return Err(format!("`{t}` is not a word over the alphabet"));
    }
    Ok(w.to_string())
}

fn braced(t: &str) -> Result<Vec<&str>, String> {
    let inner = t
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| "expected `{...}`".to_string())?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(str::trim).collect())
}

fn bits(t: &str) -> Result<String, String> {
    let w = if t == EPSILON { "" } else { t };
    if !w.chars().all(|c| c == '0' || c == '1') {
        return Err("expected a bitstring".into());
    }
    Ok(w.to_string())
}

pub(super) fn parse(sr: &Semiring, t: &str) -> Result<Value, String> {
    let no = |what: &str| Err(format!("`{what}` is not in this carrier"));
    match &sr.kind {
        Kind::Bool => match t {
            "0" => Ok(Value::Bool(false)),
            "1" => Ok(Value::Bool(true)),
            _ => Err("expected 0 or 1".into()),
        },
        Kind::Nat => Ok(Value::Nat(nat(t)?)),
        Kind::NatInf => match t {
            "+inf" | "inf" => Ok(Value::ExtNat(None)),
            _ => Ok(Value::ExtNat(Some(nat(t)?))),
        },
        Kind::Int => Ok(Value::Int(int(t)?)),
        Kind::IntMod(q) => {
            let q = BigInt::from(*q);
            let r = ((int(t)? % &q) + &q) % &q;
            Ok(Value::Residue(r.try_into().expect("residue below modulus")))
        }
        Kind::Rat => Ok(Value::Rat(rational(t)?)),
        Kind::TnormProduct => {
            let r = nonneg(t)?;
            if r > BigRational::one() {
                return Err("t-norm values lie in [0,1]".into());
            }
            Ok(Value::Rat(r))
        }
        Kind::Arctic | Kind::NatMax => match t {
            "-inf" => Ok(Value::MaxPlus(None)),
            "+inf" | "inf" => no(t),
            _ if sr.kind == Kind::Arctic => Ok(Value::MaxPlus(Some(nonneg(t)?))),
            _ => Ok(Value::MaxPlus(Some(nonneg_int(t)?))),
        },
        Kind::Trop | Kind::NatMin => match t {
            "+inf" | "inf" => Ok(Value::MinPlus(None)),
            "-inf" => no(t),
            _ if sr.kind == Kind::Trop => Ok(Value::MinPlus(Some(nonneg(t)?))),
            _ => Ok(Value::MinPlus(Some(nonneg_int(t)?))),
        },
        Kind::Langs(a) => {
            let mut out = BTreeSet::new();
            for part in braced(t)? {
                out.insert(parse_word(a, part)?);
            }
            Ok(Value::Lang(out))
        }
        Kind::Multiset(a) => {
            let mut out: BTreeMap<String, BigUint> = BTreeMap::new();
            for part in braced(t)? {
                let (w, c) = part
                    .rsplit_once(':')
                    .ok_or_else(|| format!("expected `word:count`, got `{part}`"))?;
                let c = nat(c.trim())?;
                if !c.is_zero() {
                    *out.entry(parse_word(a, w.trim())?).or_default() += c;
                }
            }
            Ok(Value::Multiset(out))
        }
        Kind::RadixMax => match t {
            "-inf" => Ok(Value::RadixMax(None)),
            "+inf" | "inf" => no(t),
            _ => Ok(Value::RadixMax(Some(bits(t)?))),
        },
        Kind::RadixMin => match t {
            "+inf" | "inf" => Ok(Value::RadixMin(None)),
            "-inf" => no(t),
            _ => Ok(Value::RadixMin(Some(bits(t)?))),
        },
    }
}
