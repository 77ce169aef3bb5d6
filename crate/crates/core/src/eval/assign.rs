use std::collections::BTreeMap;

use crate::structures::Relation;

/// Values for free variables. Unassigned variables make their atoms false.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub fo: BTreeMap<String, usize>,
    pub so: BTreeMap<String, Relation>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fo(mut self, x: &str, a: usize) -> Self {
        self.fo.insert(x.to_string(), a);
        self
    }

    pub fn with_so(mut self, x: &str, r: Relation) -> Self {
        self.so.insert(x.to_string(), r);
        self
    }

    /// Parse `x=0,X={0,2},Y:2={(0,1),(1,1)},Z:1={}` over a universe of size `n`.
    pub fn parse(text: &str, n: usize) -> Result<Self, String> {
        let mut out = Assignment::default();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let eq = rest.find('=').ok_or_else(|| format!("missing `=` in `{rest}`"))?;
            let lhs = rest[..eq].trim();
            rest = rest[eq + 1..].trim_start();
            let (name, arity) = match lhs.split_once(':') {
                Some((x, k)) => (x.trim(), Some(k.trim().parse::<usize>().map_err(|_| format!("bad arity in `{lhs}`"))?)),
                None => (lhs, None),
            };
            if name.is_empty() {
                return Err("empty variable name".into());
            }
            if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                if !rest.starts_with('{') {
                    return Err(format!("`{name}` needs a set value `{{...}}`"));
                }
                let close = rest.find('}').ok_or_else(|| format!("unterminated set for `{name}`"))?;
                let body = &rest[1..close];
                rest = &rest[close + 1..];
                let tuples = parse_tuples(body)?;
                let k = arity.or_else(|| tuples.first().map(Vec::len)).ok_or_else(|| {
                    format!("empty set for `{name}` needs an arity, as in `{name}:1={{}}`")
                })?;
                let rel = Relation::from_tuples(n, k, &tuples).map_err(|e| e.to_string())?;
                out.so.insert(name.to_string(), rel);
            } else {
                let end = rest.find(',').unwrap_or(rest.len());
                let a: usize = rest[..end].trim().parse().map_err(|_| format!("bad element for `{name}`"))?;
                if a >= n {
                    return Err(format!("element {a} for `{name}` is outside the universe of size {n}"));
                }
                out.fo.insert(name.to_string(), a);
                rest = &rest[end..];
            }
            rest = rest.trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            } else if !rest.is_empty() {
                return Err(format!("expected `,` before `{rest}`"));
            }
        }
        Ok(out)
    }
}

fn parse_tuples(body: &str) -> Result<Vec<Vec<usize>>, String> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad element `{}`", s.trim()));
    if !body.contains('(') {
        return body.split(',').map(|s| num(s).map(|a| vec![a])).collect();
    }
    let mut out = Vec::new();
    let mut rest = body;
    while let Some(open) = rest.find('(') {
        let close = rest[open..].find(')').ok_or("unterminated tuple")? + open;
        out.push(rest[open + 1..close].split(',').map(num).collect::<Result<_, _>>()?);
        rest = &rest[close + 1..];
    }
    Ok(out)
}
