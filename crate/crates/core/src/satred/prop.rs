use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::SatError;
use crate::semiring::{Semiring, Value};

/// Weighted propositional formula; negation only on variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Prop {
    Var(String),
    NegVar(String),
    Const(Value),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

/// Truth assignment, total on the variables of the formula it is used with.
pub type TruthAssignment = BTreeMap<String, bool>;

/// Default limit on the number of variables [`sat_series`] enumerates.
pub const DEFAULT_VAR_CAP: usize = 26;

impl Prop {
    /// `a ∧ b`, folding constants; 𝟘 and 𝟙 commute with everything.
    pub fn and(sr: &Semiring, a: Prop, b: Prop) -> Prop {
        match (&a, &b) {
            (Prop::Const(x), Prop::Const(y)) => Prop::Const(sr.mul(x, y)),
            (Prop::Const(x), _) if sr.is_zero(x) => a,
            (_, Prop::Const(y)) if sr.is_zero(y) => b,
            (Prop::Const(x), _) if *x == sr.one() => b,
            (_, Prop::Const(y)) if *y == sr.one() => a,
            _ => Prop::And(Box::new(a), Box::new(b)),
        }
    }

    /// `a ∨ b`, folding constants.
    pub fn or(sr: &Semiring, a: Prop, b: Prop) -> Prop {
        match (&a, &b) {
            (Prop::Const(x), Prop::Const(y)) => Prop::Const(sr.add(x, y)),
            (Prop::Const(x), _) if sr.is_zero(x) => b,
            (_, Prop::Const(y)) if sr.is_zero(y) => a,
            _ => Prop::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn big_and(sr: &Semiring, items: impl IntoIterator<Item = Prop>) -> Prop {
        items.into_iter().fold(Prop::Const(sr.one()), |acc, p| Prop::and(sr, acc, p))
    }

    pub fn big_or(sr: &Semiring, items: impl IntoIterator<Item = Prop>) -> Prop {
        items.into_iter().fold(Prop::Const(sr.zero()), |acc, p| Prop::or(sr, acc, p))
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |x| {
            if seen.insert(x.to_string()) {
                out.push(x.to_string());
            }
        });
        out
    }

    fn visit_vars(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Prop::Var(x) | Prop::NegVar(x) => f(x),
            Prop::Const(_) => {}
            Prop::And(a, b) | Prop::Or(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Prop::And(a, b) | Prop::Or(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Replace variable `x` by a truth value and fold.
    pub fn restrict(&self, sr: &Semiring, x: &str, v: bool) -> Prop {
        match self {
            Prop::Var(y) if y == x => Prop::Const(sr.from_bool(v)),
            Prop::NegVar(y) if y == x => Prop::Const(sr.from_bool(!v)),
            Prop::Var(_) | Prop::NegVar(_) | Prop::Const(_) => self.clone(),
            Prop::And(a, b) => Prop::and(sr, a.restrict(sr, x, v), b.restrict(sr, x, v)),
            Prop::Or(a, b) => Prop::or(sr, a.restrict(sr, x, v), b.restrict(sr, x, v)),
        }
    }

    /// Text form, read back by [`parse_prop`].
    pub fn display<'a>(&'a self, sr: &'a Semiring) -> impl fmt::Display + 'a {
        PropDisplay(self, sr)
    }
}

struct PropDisplay<'a>(&'a Prop, &'a Semiring);

impl fmt::Display for PropDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sr = self.1;
        match self.0 {
            Prop::Var(x) => write!(f, "{x}"),
            Prop::NegVar(x) => write!(f, "!{x}"),
            Prop::Const(v) => write!(f, "c({})", sr.format(v)),
            Prop::And(a, b) => write!(f, "({} & {})", a.display(sr), b.display(sr)),
            Prop::Or(a, b) => write!(f, "({} | {})", a.display(sr), b.display(sr)),
        }
    }
}

/// `V̄(φ)`: ∨ adds, ∧ multiplies left to right, constants stand for themselves.
pub fn eval_prop(phi: &Prop, v: &TruthAssignment, sr: &Semiring) -> Result<Value, SatError> {
    Ok(match phi {
        Prop::Var(x) | Prop::NegVar(x) => {
            let b = *v.get(x).ok_or_else(|| SatError::MissingVariable(x.clone()))?;
            sr.from_bool(b == matches!(phi, Prop::Var(_)))
        }
        Prop::Const(c) => c.clone(),
        Prop::And(a, b) => sr.mul(&eval_prop(a, v, sr)?, &eval_prop(b, v, sr)?),
        Prop::Or(a, b) => sr.add(&eval_prop(a, v, sr)?, &eval_prop(b, v, sr)?),
    })
}

/// `SAT[S](φ) = Σ_V V̄(φ)` over all assignments of the variables of `φ`.
///
/// Enumerates assignments variable by variable, folding constants as it
/// goes; a branch that no longer mentions the remaining `r` variables
/// contributes its value `2^r` times.
pub fn sat_series(phi: &Prop, sr: &Semiring, cap: usize) -> Result<Value, SatError> {
    let vars = phi.vars();
    if vars.len() > cap {
        return Err(SatError::CapExceeded { vars: vars.len(), cap });
    }
    Ok(split(phi, &vars, sr))
}

fn split(phi: &Prop, vars: &[String], sr: &Semiring) -> Value {
    match (phi, vars.split_first()) {
        (Prop::Const(c), _) => {
            let mut v = c.clone();
            for _ in vars {
                v = sr.add(&v, &v);
            }
            v
        }
        (_, None) => unreachable!("a formula without variables folds to a constant"),
        (_, Some((x, rest))) => {
            let lo = split(&phi.restrict(sr, x, false), rest, sr);
            let hi = split(&phi.restrict(sr, x, true), rest, sr);
            sr.add(&lo, &hi)
        }
    }
}

/// Read the text form: variables `X[0,1]` or plain identifiers, `!x`,
/// constants `c(literal)`, `&`, `|`, parentheses. `&` binds tighter.
pub fn parse_prop(text: &str, sr: &Semiring) -> Result<Prop, SatError> {
    let mut p = PropParser { s: text.as_bytes(), pos: 0, sr };
    let out = p.or()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

struct PropParser<'a> {
    s: &'a [u8],
    pos: usize,
    sr: &'a Semiring,
}

impl PropParser<'_> {
    fn err(&self, msg: &str) -> SatError {
        SatError::Parse { offset: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Prop, SatError> {
        let mut acc = self.and()?;
        while self.eat(b'|') {
            let rhs = self.and()?;
            acc = Prop::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Prop, SatError> {
        let mut acc = self.atom()?;
        while self.eat(b'&') {
            let rhs = self.atom()?;
            acc = Prop::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Prop, SatError> {
        if self.eat(b'(') {
            let inner = self.or()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(inner);
        }
        if self.eat(b'!') {
            return Ok(Prop::NegVar(self.var()?));
        }
        self.ws();
        if self.s[self.pos..].starts_with(b"c(") {
            self.pos += 2;
            let start = self.pos;
            let mut depth = 1;
            while self.pos < self.s.len() {
                match self.s[self.pos] {
                    b'(' => depth += 1,
                    b')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                self.pos += 1;
            }
            if depth != 0 {
                return Err(self.err("unclosed constant"));
            }
            let lit = std::str::from_utf8(&self.s[start..self.pos]).expect("input is text");
            self.pos += 1;
            let v = self.sr.parse_literal(lit).map_err(|e| SatError::BadLiteral(e.to_string()))?;
            return Ok(Prop::Const(v));
        }
        Ok(Prop::Var(self.var()?))
    }

    fn var(&mut self) -> Result<String, SatError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a variable"));
        }
        if self.s.get(self.pos) == Some(&b'[') {
            while self.pos < self.s.len() && self.s[self.pos] != b']' {
                self.pos += 1;
            }
            if self.pos == self.s.len() {
                return Err(self.err("unclosed `[`"));
            }
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).expect("input is text");
        Ok(name.chars().filter(|c| !c.is_whitespace()).collect())
    }
}
