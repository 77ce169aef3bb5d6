//! Lexer and recursive-descent parser for `.wl` formula files.
//!
//! A file is a sequence of macro definitions followed by one formula:
//!
//! ```text
//! # comment
//! def clique(X:1) := forall x. forall y. ((X(x) & X(y) & x != y) -> edge(x, y));
//! sum X:1. (clique(X) (*) prod x. (c(0) (+) (c(1) (*) X(x))))
//! ```
//!
//! Precedence, loosest first: `?`, `<->`, `->` (right), `|` and `(+)`,
//! `&` and `(*)`, then prefix `!` and quantifiers. Quantifier bodies extend
//! as far right as possible.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::{Arg, Closure, ConstLit, FixKind, Fixpoint, Formula};
use super::subst::substitute;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    Lit(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Assign,
    Semi,
    Eq,
    Neq,
    Lt,
    Bang,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Question,
    OPlus,
    OTimes,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Lit(l) => format!("`c({l})`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, (usize, String)> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = src[i..].chars().next().expect("char boundary");
        let rest = &src[i..];
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c == '#' {
            i += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        let start = i;
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            let word = &rest[..len];
            if word == "c" && rest[len..].starts_with('(') {
                let close = rest[len..]
                    .find(')')
                    .ok_or((start, "unterminated constant `c(`".to_string()))?;
                let lit = rest[len + 1..len + close].trim().to_string();
                if lit.is_empty() {
                    return Err((start, "empty constant literal".into()));
                }
                (Tok::Lit(lit), len + close + 1)
            } else {
                (Tok::Ident(word.to_string()), len)
            }
        } else if c.is_ascii_digit() {
            let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..len]
                .parse()
                .map_err(|_| (start, "numeral out of range".to_string()))?;
            (Tok::Num(n), len)
        } else if rest.starts_with("(+)") {
            (Tok::OPlus, 3)
        } else if rest.starts_with("(*)") {
            (Tok::OTimes, 3)
        } else if rest.starts_with("<->") {
            (Tok::DArrow, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else if rest.starts_with(":=") {
            (Tok::Assign, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '?' => Tok::Question,
                other => return Err((start, format!("unexpected character `{other}`"))),
            };
            (t, c.len_utf8())
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

/// Macro parameter: first-order, or second-order with an arity.
#[derive(Clone, Debug)]
struct Param {
    name: String,
    arity: Option<usize>,
}

#[derive(Clone, Debug)]
struct Def {
    params: Vec<Param>,
    body: Formula,
}

const KEYWORDS: &[&str] = &[
    "false", "true", "exists", "forall", "existsSO", "sum", "prod", "sumSO", "prodSO", "tc", "dtc",
    "lfp", "gfp", "ifp", "pfp", "one", "zero", "def",
];

fn is_fo_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && !KEYWORDS.contains(&s)
}

fn is_so_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    defs: HashMap<String, Def>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let offset = self.toks[self.pos].1;
        let (line, col) = line_col(self.src, offset);
        Err(ParseError { offset, line, col, msg: msg.into() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", describe(&t), describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected an identifier, found {}", describe(&other))),
        }
    }

    fn fo_var(&mut self) -> PResult<String> {
        let v = self.ident()?;
        if !is_fo_name(&v) {
            self.pos -= 1;
            return self.err(format!("`{v}` is not a first-order variable (lowercase identifier)"));
        }
        Ok(v)
    }

    fn num(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            other => self.err(format!("expected a numeral, found {}", describe(&other))),
        }
    }

    fn program(&mut self) -> PResult<Formula> {
        while self.peek() == &Tok::Ident("def".into()) {
            self.bump();
            self.definition()?;
        }
        let f = self.guard()?;
        if self.peek() != &Tok::Eof {
            return self.err(format!("unexpected {}", describe(self.peek())));
        }
        Ok(f)
    }

    fn definition(&mut self) -> PResult<()> {
        let name = self.ident()?;
        if !is_fo_name(&name) || name == "c" {
            self.pos -= 1;
            return self.err(format!("macro name `{name}` must be a lowercase identifier"));
        }
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let p = self.ident()?;
                let arity = if self.eat(&Tok::Colon) { Some(self.num()?) } else { None };
                if arity.is_some() != is_so_name(&p) {
                    self.pos -= 1;
                    return self.err(format!("parameter `{p}`: second-order parameters are uppercase with an arity"));
                }
                params.push(Param { name: p, arity });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        self.expect(Tok::Assign)?;
        let body = self.guard()?;
        self.expect(Tok::Semi)?;
        self.defs.insert(name, Def { params, body });
        Ok(())
    }

    fn guard(&mut self) -> PResult<Formula> {
        let lhs = self.iff()?;
        if self.eat(&Tok::Question) {
            let rhs = self.guard()?;
            return Ok(Formula::guard(lhs, rhs));
        }
        Ok(lhs)
    }

    fn iff(&mut self) -> PResult<Formula> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut lhs = self.and()?;
        loop {
            if self.eat(&Tok::Bar) {
                lhs = Formula::or(lhs, self.and()?);
            } else if self.eat(&Tok::OPlus) {
                lhs = Formula::oplus(lhs, self.and()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Amp) {
                lhs = Formula::and(lhs, self.unary()?);
            } else if self.eat(&Tok::OTimes) {
                lhs = Formula::otimes(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        if let Tok::Ident(kw) = self.peek().clone() {
            let quant = matches!(
                kw.as_str(),
                "exists" | "forall" | "existsSO" | "sum" | "prod" | "sumSO" | "prodSO"
            );
            if quant {
                self.bump();
                return self.quantifier(&kw);
            }
        }
        self.primary()
    }

    fn quantifier(&mut self, kw: &str) -> PResult<Formula> {
        let var = self.ident()?;
        let arity = if self.eat(&Tok::Colon) { Some(self.num()?) } else { None };
        let so = is_so_name(&var);
        if so != arity.is_some() || (!so && !is_fo_name(&var)) {
            return self.err(format!(
                "bad variable `{var}`: first-order variables are lowercase, second-order ones uppercase with `:arity`"
            ));
        }
        if kw.ends_with("SO") && !so {
            return self.err(format!("`{kw}` binds a second-order variable"));
        }
        if arity == Some(0) {
            return self.err("second-order arity must be at least 1");
        }
        self.expect(Tok::Dot)?;
        let body = self.guard()?;
        Ok(match (kw, arity) {
            ("exists", None) => Formula::exists(&var, body),
            ("forall", None) => Formula::forall(&var, body),
            ("sum", None) => Formula::sum(&var, body),
            ("prod", None) => Formula::prod(&var, body),
            ("exists" | "existsSO", Some(k)) => Formula::exists_so(&var, k, body),
            ("forall", Some(k)) => Formula::not(Formula::exists_so(&var, k, Formula::not(body))),
            ("sum" | "sumSO", Some(k)) => Formula::sum_so(&var, k, body),
            ("prod" | "prodSO", Some(k)) => Formula::prod_so(&var, k, body),
            _ => unreachable!("quantifier keyword"),
        })
    }

    fn args(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn terms(&mut self) -> PResult<Vec<Arg>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Num(n) => {
                    self.bump();
                    out.push(Arg::Elem(n));
                }
                _ => out.push(Arg::Var(self.fo_var()?)),
            }
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn var_tuple(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        loop {
            out.push(self.fo_var()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn bracket(&mut self) -> PResult<Formula> {
        let kw = self.ident()?;
        match kw.as_str() {
            "tc" | "dtc" => {
                let from = self.var_tuple()?;
                self.expect(Tok::Arrow)?;
                let to = self.var_tuple()?;
                if from.len() != to.len() {
                    return self.err("closure tuples must have equal length");
                }
                self.expect(Tok::Dot)?;
                let body = self.guard()?;
                self.expect(Tok::RBrack)?;
                let args = self.terms()?;
                if args.len() != 2 * from.len() {
                    return self.err(format!("closure expects {} arguments", 2 * from.len()));
                }
                let c = Closure { from, to, body: Box::new(body), args };
                Ok(if kw == "tc" { Formula::Tc(c) } else { Formula::Dtc(c) })
            }
            "lfp" | "gfp" | "ifp" | "pfp" => {
                let kind = match kw.as_str() {
                    "lfp" => FixKind::Lfp,
                    "gfp" => FixKind::Gfp,
                    "ifp" => FixKind::Ifp,
                    _ => FixKind::Pfp,
                };
                let rel = self.ident()?;
                if !is_so_name(&rel) {
                    self.pos -= 1;
                    return self.err("fixed-point relation variables are uppercase");
                }
                let vars = self.var_tuple()?;
                self.expect(Tok::Dot)?;
                let body = self.guard()?;
                self.expect(Tok::RBrack)?;
                let args = self.terms()?;
                if args.len() != vars.len() {
                    return self.err(format!("fixed point expects {} arguments", vars.len()));
                }
                Ok(Formula::Fix(kind, Fixpoint { rel, vars, body: Box::new(body), args }))
            }
            other => {
                self.pos -= 1;
                self.err(format!("unknown bracket operator `{other}`"))
            }
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.guard()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrack => {
                self.bump();
                self.bracket()
            }
            Tok::Lit(l) => {
                self.bump();
                Ok(Formula::Const(ConstLit::Lit(l)))
            }
            Tok::Ident(id) => {
                match id.as_str() {
                    "false" => {
                        self.bump();
                        return Ok(Formula::False);
                    }
                    "true" => {
                        self.bump();
                        return Ok(Formula::True);
                    }
                    "one" => {
                        self.bump();
                        return Ok(Formula::one());
                    }
                    "zero" => {
                        self.bump();
                        return Ok(Formula::zero());
                    }
                    _ => {}
                }
                if KEYWORDS.contains(&id.as_str()) {
                    return self.err(format!("unexpected keyword `{id}`"));
                }
                self.bump();
                match self.peek() {
                    Tok::LParen => {
                        let args = self.args()?;
                        self.application(id, args)
                    }
                    Tok::Eq | Tok::Neq | Tok::Lt => {
                        let op = self.bump();
                        if !is_fo_name(&id) {
                            self.pos -= 2;
                            return self.err(format!("`{id}` is not a first-order variable"));
                        }
                        let rhs = self.fo_var()?;
                        Ok(match op {
                            Tok::Eq => Formula::Eq(id, rhs),
                            Tok::Neq => Formula::not(Formula::Eq(id, rhs)),
                            _ => Formula::Less(id, rhs),
                        })
                    }
                    _ => self.err(format!("expected `(`, `=`, `!=` or `<` after `{id}`")),
                }
            }
            other => self.err(format!("unexpected {}", describe(&other))),
        }
    }

    fn application(&mut self, name: String, args: Vec<String>) -> PResult<Formula> {
        if is_so_name(&name) {
            for a in &args {
                if !is_fo_name(a) {
                    return self.err(format!("argument `{a}` is not a first-order variable"));
                }
            }
            return Ok(Formula::So(name, args));
        }
        if let Some(def) = self.defs.get(&name).cloned() {
            if def.params.len() != args.len() {
                return self.err(format!("macro `{name}` takes {} arguments", def.params.len()));
            }
            let mut fo = HashMap::new();
            let mut so = HashMap::new();
            for (p, a) in def.params.iter().zip(&args) {
                match p.arity {
                    None if is_fo_name(a) => {
                        fo.insert(p.name.clone(), a.clone());
                    }
                    Some(_) if is_so_name(a) => {
                        so.insert(p.name.clone(), a.clone());
                    }
                    _ => return self.err(format!("argument `{a}` does not match parameter `{}`", p.name)),
                }
            }
            return Ok(substitute(&def.body, &fo, &so));
        }
        for a in &args {
            if !is_fo_name(a) {
                return self.err(format!("argument `{a}` is not a first-order variable"));
            }
        }
        Ok(Formula::Rel(name, args))
    }
}

/// Parse a `.wl` text: optional `def` lines, then one formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text).map_err(|(offset, msg)| {
        let (line, col) = line_col(text, offset);
        ParseError { offset, line, col, msg }
    })?;
    Parser { src: text, toks, pos: 0, defs: HashMap::new() }.program()
}
