//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wdc_core::logic::{ConstLit, Formula};
use wdc_core::machine::{MachineBuilder, Move, WeightedTm};
use wdc_core::semiring::Semiring;
use wdc_core::structures::{Signature, Structure};

pub fn sr(name: &str) -> Semiring {
    name.parse().unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---- random formulas ----------------------------------------------------

/// Random sentences over `p:1, e:2` with the constants written `c(A)`
/// and `c(B)`; see [`instantiate`].
pub struct FormulaGen<'r> {
    pub rng: &'r mut StdRng,
    /// Second-order variables in scope, with arities.
    so: Vec<(String, usize)>,
    fresh: usize,
}

impl<'r> FormulaGen<'r> {
    pub fn new(rng: &'r mut StdRng) -> Self {
        FormulaGen { rng, so: Vec::new(), fresh: 0 }
    }

    fn var(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    fn pick<'a>(&mut self, vars: &'a [String]) -> &'a str {
        &vars[self.rng.gen_range(0..vars.len())]
    }

    /// `sumSO X:k. … body` with 0 to 2 second-order variables of arity 1 or 2.
    pub fn weso(&mut self, depth: usize) -> String {
        self.so.clear();
        self.fresh = 0;
        let count = [0, 1, 1, 1, 2][self.rng.gen_range(0..5)];
        let mut prefix = String::new();
        for name in ["X", "Y"].into_iter().take(count) {
            let k = if self.rng.gen_bool(0.7) { 1 } else { 2 };
            self.so.push((name.to_string(), k));
            prefix.push_str(&format!("sumSO {name}:{k}. "));
        }
        format!("{prefix}{}", self.weighted(depth, &[]))
    }

    /// A sentence mixing weighted and Boolean connectives, with
    /// second-order existentials but no weighted second-order operators.
    pub fn mixed(&mut self, depth: usize) -> String {
        self.so.clear();
        self.fresh = 0;
        self.weighted_or_so(depth, &[])
    }

    fn weighted_or_so(&mut self, depth: usize, vars: &[String]) -> String {
        if depth > 0 && self.rng.gen_bool(0.2) {
            let name = if self.so.iter().any(|(x, _)| x == "X") { "Y" } else { "X" };
            if !self.so.iter().any(|(x, _)| x == name) {
                let k = self.rng.gen_range(1..=2);
                self.so.push((name.to_string(), k));
                let body = self.boolean(depth - 1, vars);
                self.so.pop();
                return format!("(existsSO {name}:{k}. {body})");
            }
        }
        self.weighted(depth, vars)
    }

    fn weighted(&mut self, depth: usize, vars: &[String]) -> String {
        let choice = if depth == 0 { 0 } else { self.rng.gen_range(0..9) };
        let leaf = |g: &mut Self| {
            if vars.is_empty() || g.rng.gen_bool(0.4) {
                ["c(A)", "c(B)", "one", "zero"][g.rng.gen_range(0..4)].to_string()
            } else {
                g.atom(vars)
            }
        };
        match choice {
            0 => leaf(self),
            1 => format!("({} (+) {})", self.weighted(depth - 1, vars), self.weighted(depth - 1, vars)),
            2 => format!("({} (*) {})", self.weighted(depth - 1, vars), self.weighted(depth - 1, vars)),
            3 if !vars.is_empty() => format!("({} ? {})", self.boolean(depth - 1, vars), self.weighted(depth - 1, vars)),
            4 | 5 | 3 => {
                let x = self.var();
                let inner: Vec<String> = vars.iter().cloned().chain([x.clone()]).collect();
                format!("(sum {x}. {})", self.weighted(depth - 1, &inner))
            }
            6 | 7 => {
                let x = self.var();
                let inner: Vec<String> = vars.iter().cloned().chain([x.clone()]).collect();
                format!("(prod {x}. {})", self.weighted(depth - 1, &inner))
            }
            _ => self.boolean(depth, vars),
        }
    }

    fn atom(&mut self, vars: &[String]) -> String {
        let so: Vec<(String, usize)> = self.so.clone();
        let kinds = if so.is_empty() { 4 } else { 6 };
        match self.rng.gen_range(0..kinds) {
            0 => format!("p({})", self.pick(vars)),
            1 => format!("e({}, {})", self.pick(vars), self.pick(vars)),
            2 => format!("{} = {}", self.pick(vars), self.pick(vars)),
            3 => format!("{} < {}", self.pick(vars), self.pick(vars)),
            _ => {
                let (x, k) = &so[self.rng.gen_range(0..so.len())];
                let args: Vec<&str> = (0..*k).map(|_| self.pick(vars)).collect();
                format!("{x}({})", args.join(", "))
            }
        }
    }

    fn boolean(&mut self, depth: usize, vars: &[String]) -> String {
        if depth == 0 || (!vars.is_empty() && self.rng.gen_bool(0.25)) {
            return if vars.is_empty() {
                ["true", "false"][self.rng.gen_range(0..2)].to_string()
            } else {
                self.atom(vars)
            };
        }
        match self.rng.gen_range(0..6) {
            0 => format!("!({})", self.boolean(depth - 1, vars)),
            1 => format!("({} & {})", self.boolean(depth - 1, vars), self.boolean(depth - 1, vars)),
            2 => format!("({} | {})", self.boolean(depth - 1, vars), self.boolean(depth - 1, vars)),
            3 => format!("({} -> {})", self.boolean(depth - 1, vars), self.boolean(depth - 1, vars)),
            k => {
                let x = self.var();
                let inner: Vec<String> = vars.iter().cloned().chain([x.clone()]).collect();
                let q = if k == 4 { "exists" } else { "forall" };
                format!("({q} {x}. {})", self.boolean(depth - 1, &inner))
            }
        }
    }
}

/// Replace the placeholder constants by literals of `sr`.
pub fn instantiate(src: &str, sr: &Semiring) -> String {
    let (a, b) = match sr.name() {
        "nat" => ("2", "3"),
        "int_mod" => ("1", "0"),
        "nat_max" => ("2", "5"),
        "langs" => ("{a}", "{b, c}"),
        "bool" => ("1", "0"),
        "rat" => ("1/2", "3"),
        "trop" => ("1", "4"),
        _ => ("1", "1"),
    };
    src.replace("c(A)", &format!("c({a})")).replace("c(B)", &format!("c({b})"))
}

pub fn sig_pe() -> Signature {
    Signature::parse("p:1, e:2").unwrap()
}

/// Uniformly random structure of size `n`.
pub fn random_structure(rng: &mut StdRng, sig: &Signature, n: usize) -> Structure {
    let mut a = Structure::new(n, sig.clone()).unwrap();
    for (name, k) in sig.iter() {
        let tuples: Vec<Vec<usize>> = wdc_core::structures::tuples_lex(n, k).filter(|_| rng.gen_bool(0.5)).collect();
        a = a.with_relation(name, &tuples).unwrap();
    }
    a
}

// ---- classical satisfaction ------------------------------------------

/// Two-valued reading: `⊕` as `∨`, `⊗` as `∧`, `Σ` as `∃`, `Π` as `∀`,
/// `β ? φ` as `β → φ`, `zero` false and every other constant true.
pub fn classical(f: &Formula, a: &Structure) -> bool {
    Classical { a, fo: BTreeMap::new(), so: BTreeMap::new() }.holds(f)
}

struct Classical<'a> {
    a: &'a Structure,
    fo: BTreeMap<String, usize>,
    so: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl Classical<'_> {
    fn tuple(&self, args: &[String]) -> Vec<usize> {
        args.iter().map(|x| self.fo[x]).collect()
    }

    fn each_elem(&mut self, x: &str, g: &Formula, any: bool) -> bool {
        let saved = self.fo.get(x).copied();
        let mut out = !any;
        for e in 0..self.a.size() {
            self.fo.insert(x.to_string(), e);
            if self.holds(g) == any {
                out = any;
                break;
            }
        }
        match saved {
            Some(v) => self.fo.insert(x.to_string(), v),
            None => self.fo.remove(x),
        };
        out
    }

    fn each_set(&mut self, x: &str, k: usize, g: &Formula, any: bool) -> bool {
        let all: Vec<Vec<usize>> = wdc_core::structures::tuples_lex(self.a.size(), k).collect();
        let saved = self.so.remove(x);
        let mut out = !any;
        for code in 0u64..1 << all.len() {
            let set = all.iter().enumerate().filter(|(i, _)| code >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
            self.so.insert(x.to_string(), set);
            if self.holds(g) == any {
                out = any;
                break;
            }
        }
        self.so.remove(x);
        if let Some(s) = saved {
            self.so.insert(x.to_string(), s);
        }
        out
    }

    fn holds(&mut self, f: &Formula) -> bool {
        use Formula::*;
        match f {
            True => true,
            False => false,
            Eq(x, y) => self.fo[x] == self.fo[y],
            Less(x, y) => self.fo[x] < self.fo[y],
            Rel(r, args) => self.a.relation(r).unwrap().contains(&self.tuple(args)),
            So(x, args) => self.so.get(x).is_some_and(|s| s.contains(&self.tuple(args))),
            Not(g) => !self.holds(g),
            Or(x, y) | OPlus(x, y) => self.holds(x) || self.holds(y),
            And(x, y) | OTimes(x, y) => self.holds(x) && self.holds(y),
            Implies(x, y) | Guard(x, y) => !self.holds(x) || self.holds(y),
            Iff(x, y) => self.holds(x) == self.holds(y),
            ExistsFo(x, g) | SumFo(x, g) => self.each_elem(x, g, true),
            ForallFo(x, g) | ProdFo(x, g) => self.each_elem(x, g, false),
            ExistsSo(x, k, g) | SumSo(x, k, g) => self.each_set(x, *k, g, true),
            ProdSo(x, k, g) => self.each_set(x, *k, g, false),
            Const(c) => !matches!(c, ConstLit::Zero) && !matches!(c, ConstLit::Lit(l) if l == "0"),
            Tc(_) | Dtc(_) | Fix(..) => unimplemented!("closures are not generated"),
        }
    }
}

// ---- graphs --------------------------------------------------------------

pub fn graph_sig() -> Signature {
    Signature::parse("edge:2").unwrap()
}

pub fn graph(n: usize, edges: &BTreeSet<(usize, usize)>) -> Structure {
    Structure::new(n, graph_sig()).unwrap().with_relation("edge", edges.iter().map(|&(a, b)| [a, b])).unwrap()
}

pub fn random_undirected(rng: &mut StdRng, n: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.5) {
                out.insert((a, b));
                out.insert((b, a));
            }
        }
    }
    out
}

pub fn random_digraph(rng: &mut StdRng, n: usize, p: f64) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(p) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Random DAG: edges only from lower to higher vertex numbers.
pub fn random_dag(rng: &mut StdRng, n: usize) -> BTreeSet<(usize, usize)> {
    random_digraph(rng, n, 0.5).into_iter().filter(|(a, b)| a < b).collect()
}

/// Every pair of distinct members is joined.
pub fn is_clique(edges: &BTreeSet<(usize, usize)>, members: &[usize]) -> bool {
    members.iter().all(|&a| members.iter().all(|&b| a == b || edges.contains(&(a, b))))
}

pub fn members(n: usize, code: u64) -> Vec<usize> {
    (0..n).filter(|i| code >> i & 1 == 1).collect()
}

pub fn largest_clique(n: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    (0u64..1 << n).map(|c| members(n, c)).filter(|m| is_clique(edges, m)).map(|m| m.len()).max().unwrap()
}

pub fn count_cliques(n: usize, edges: &BTreeSet<(usize, usize)>, size: usize) -> usize {
    (0u64..1 << n).map(|c| members(n, c)).filter(|m| m.len() == size && is_clique(edges, m)).count()
}

/// Minimum number of edges from `S` to `D` over partitions with every
/// vertex without predecessors in `S` and every vertex without successors
/// in `D`; `None` if there is no such partition.
pub fn min_cut(n: usize, edges: &BTreeSet<(usize, usize)>) -> Option<usize> {
    let has_pred = |v: usize| edges.iter().any(|&(_, b)| b == v);
    let has_succ = |v: usize| edges.iter().any(|&(a, _)| a == v);
    (0u64..1 << n)
        .filter(|s| (0..n).all(|v| (has_pred(v) || s >> v & 1 == 1) && (has_succ(v) || s >> v & 1 == 0)))
        .map(|s| edges.iter().filter(|&&(a, b)| s >> a & 1 == 1 && s >> b & 1 == 0).count())
        .min()
}

/// Transitive closure (paths of length at least one) by Warshall's algorithm.
pub fn transitive_closure(n: usize, edges: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| r[i][j]).collect()
}

// ---- hand-built machines -------------------------------------------------

pub type Rule<'a> = (&'a str, &'a str, &'a str, &'a str, i64, &'a str);

/// Machine over input `{0, 1}` and blank `_`, starting in `q0`.
pub fn machine(sr: &Semiring, rules: &[Rule<'_>], accepting: &[&str]) -> WeightedTm {
    let mut b = MachineBuilder::new(sr.clone(), "_", "q0");
    b.input_symbol("0");
    b.input_symbol("1");
    for &(p, a, q, w, d, wt) in rules {
        b.add_named(p, a, q, w, Move::from_int(d).unwrap(), sr.parse_literal(wt).unwrap());
    }
    for f in accepting {
        let q = b.state(f);
        b.accept(q);
    }
    b.build().unwrap()
}

/// Weight literal `w`, or the unit where the semiring is Boolean.
fn lit(sr: &Semiring, w: &'static str) -> &'static str {
    if sr.name() == "bool" {
        "1"
    } else {
        w
    }
}

/// Reads the first cell once: weight 2 on `1`, 1 on `0`.
pub fn first_bit(sr: &Semiring) -> WeightedTm {
    machine(sr, &[("q0", "1", "qa", "1", 1, lit(sr, "2")), ("q0", "0", "qa", "0", 0, "1")], &["qa"])
}

/// Two moves on `1`; on `0` a second step over the next cell, which must be blank.
pub fn branching(sr: &Semiring) -> WeightedTm {
    machine(
        sr,
        &[
            ("q0", "1", "qa", "1", 1, lit(sr, "3")),
            ("q0", "1", "qa", "0", 0, lit(sr, "2")),
            ("q0", "0", "qb", "1", 1, "1"),
            ("qb", "_", "qa", "_", 0, "1"),
        ],
        &["qa"],
    )
}

/// Erases a leading `1`; after a leading `0` it reads the second cell.
pub fn eraser(sr: &Semiring) -> WeightedTm {
    machine(
        sr,
        &[
            ("q0", "1", "qa", "_", 1, lit(sr, "2")),
            ("q0", "0", "q1", "1", 1, lit(sr, "3")),
            ("q1", "0", "qa", "0", 0, lit(sr, "5")),
            ("q1", "1", "qa", "1", 0, "1"),
        ],
        &["qa"],
    )
}
