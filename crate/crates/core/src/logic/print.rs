//! Canonical concrete syntax. Binary connectives are always parenthesized,
//! so the output parses back to the same tree.

use std::fmt::{self, Write};

use super::ast::{Arg, Closure, ConstLit, Fixpoint, Formula};

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) => f.write_str(v),
            Arg::Elem(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for ConstLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstLit::Zero => f.write_str("zero"),
            ConstLit::One => f.write_str("one"),
            ConstLit::Lit(l) => write!(f, "c({l})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        print(self, &mut out);
        f.write_str(&out)
    }
}

/// True if the printed form ends in a quantifier body that would swallow
/// anything written after it.
fn ends_open(f: &Formula) -> bool {
    use Formula::*;
    match f {
        ExistsFo(..) | ForallFo(..) | ExistsSo(..) | SumFo(..) | ProdFo(..) | SumSo(..) | ProdSo(..) => true,
        Not(g) => !matches!(**g, Eq(..)) && ends_open(g),
        _ => false,
    }
}

fn join(items: impl IntoIterator<Item = impl fmt::Display>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

fn binary(op: &str, x: &Formula, y: &Formula, out: &mut String) {
    out.push('(');
    if ends_open(x) {
        out.push('(');
        print(x, out);
        out.push(')');
    } else {
        print(x, out);
    }
    let _ = write!(out, " {op} ");
    print(y, out);
    out.push(')');
}

fn closure(kw: &str, c: &Closure, out: &mut String) {
    let _ = write!(out, "[{kw} ({}) -> ({}). ", join(&c.from), join(&c.to));
    print(&c.body, out);
    let _ = write!(out, "]({})", join(&c.args));
}

fn fixpoint(kw: &str, p: &Fixpoint, out: &mut String) {
    let _ = write!(out, "[{kw} {}({}). ", p.rel, join(&p.vars));
    print(&p.body, out);
    let _ = write!(out, "]({})", join(&p.args));
}

fn print(f: &Formula, out: &mut String) {
    use Formula::*;
    match f {
        False => out.push_str("false"),
        True => out.push_str("true"),
        Eq(x, y) => {
            let _ = write!(out, "{x} = {y}");
        }
        Less(x, y) => {
            let _ = write!(out, "{x} < {y}");
        }
        Rel(r, args) | So(r, args) => {
            let _ = write!(out, "{r}({})", join(args));
        }
        Not(g) => match &**g {
            Eq(x, y) => {
                let _ = write!(out, "{x} != {y}");
            }
            _ => {
                out.push('!');
                print(g, out);
            }
        },
        Or(x, y) => binary("|", x, y, out),
        And(x, y) => binary("&", x, y, out),
        Implies(x, y) => binary("->", x, y, out),
        Iff(x, y) => binary("<->", x, y, out),
        OPlus(x, y) => binary("(+)", x, y, out),
        OTimes(x, y) => binary("(*)", x, y, out),
        Guard(x, y) => binary("?", x, y, out),
        ExistsFo(x, g) => quant(&format!("exists {x}."), g, out),
        ForallFo(x, g) => quant(&format!("forall {x}."), g, out),
        ExistsSo(x, k, g) => quant(&format!("exists {x}:{k}."), g, out),
        SumFo(x, g) => quant(&format!("sum {x}."), g, out),
        ProdFo(x, g) => quant(&format!("prod {x}."), g, out),
        SumSo(x, k, g) => quant(&format!("sum {x}:{k}."), g, out),
        ProdSo(x, k, g) => quant(&format!("prod {x}:{k}."), g, out),
        Const(c) => {
            let _ = write!(out, "{c}");
        }
        Tc(c) => closure("tc", c, out),
        Dtc(c) => closure("dtc", c, out),
        Fix(kind, p) => fixpoint(kind.keyword(), p, out),
    }
}

fn quant(head: &str, body: &Formula, out: &mut String) {
    out.push_str(head);
    out.push(' ');
    print(body, out);
}
