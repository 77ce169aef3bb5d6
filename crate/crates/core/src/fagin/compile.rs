//! wESO sentence to weighted Turing machine.
//!
//! The machine reads `enc(𝔄)` over `{0,1}` (followed by the encodings of the
//! free second-order variables, in name order) and first rewrites its tape
//! into
//!
//! ```text
//! $ D₀ D₁ … # R | B₀ | B₁ | … | G₀ G₁ …
//! ```
//!
//! `Dᵢ` are the input segments, one per relation, each with a start mark on
//! its first cell. `R` is a ruler of `n` cells; its tracks count nested
//! loops. Block `Bⱼ` has `n` cells and holds the value of the first-order
//! variable bound at quantifier depth `j` as the position of its single `O`
//! (position 0 while the variable is out of scope). `Gⱼ` are the guessed
//! relations of the leading `⨁X` quantifiers.
//!
//! Every routine starts and ends on `$` with the tape clean. Boolean parts
//! are deterministic with weight-𝟙 moves and two exits; weighted parts have
//! one exit and reject by having no move.

use std::collections::{BTreeMap, BTreeSet};

use super::FaginError;
use crate::logic::{check_fragment, check_well_formed, rename_apart, ConstLit, Formula, Fragment, WfOptions};
use crate::machine::{MachineBuilder, Move, WeightedTm};
use crate::semiring::{Semiring, Value};
use crate::structures::Signature;

const L: Move = Move::Left;
const R: Move = Move::Right;
const S: Move = Move::Stay;

fn bit(b: usize) -> String {
    b.to_string()
}

fn start(b: usize) -> String {
    format!("s{b}")
}

fn visited(b: usize) -> String {
    format!("v{b}")
}

fn vstart(b: usize) -> String {
    format!("w{b}")
}

fn rcell(mask: u32) -> String {
    format!("r{mask}")
}

fn track(m: u32) -> u32 {
    1 << (m - 1)
}

fn submasks(mask: u32) -> Vec<u32> {
    (0..=mask).filter(|s| s & !mask == 0).collect()
}

fn strs(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn clean_data() -> Vec<String> {
    strs(&["0", "1", "s0", "s1"])
}

fn visited_data() -> Vec<String> {
    strs(&["v0", "v1", "w0", "w1"])
}

/// A stretch of tape as seen by a scan.
#[derive(Clone, Debug)]
enum Reg {
    Sep(&'static str),
    /// Cells drawn from one set, no distinguished first cell.
    Plain(Vec<String>),
    /// A segment: a start cell, then body cells.
    Seg { start: Vec<String>, body: Vec<String> },
}

impl Reg {
    fn all(&self) -> Vec<String> {
        match self {
            Reg::Sep(s) => vec![s.to_string()],
            Reg::Plain(v) => v.clone(),
            Reg::Seg { start, body } => start.iter().chain(body).cloned().collect(),
        }
    }
}

/// Which parts of the main layout may carry temporary marks.
#[derive(Clone, Debug, Default)]
struct Dirt {
    seg: Option<usize>,
    blocks: BTreeSet<usize>,
    tracks: u32,
}

impl Dirt {
    fn seg(i: usize) -> Self {
        Dirt { seg: Some(i), ..Dirt::default() }
    }

    fn blocks(bs: &[usize]) -> Self {
        Dirt { blocks: bs.iter().copied().collect(), ..Dirt::default() }
    }
}

/// Where an inner loop body runs; decides the layout it scans and what the
/// innermost step does.
#[derive(Clone, Copy, Debug)]
enum Phase {
    /// Finding `n`: the innermost step visits the next input cell.
    Search,
    /// Building block `done`: the innermost step appends one cell.
    Build { done: usize },
    /// Guessing a relation: the innermost step appends a guessed bit.
    Guess,
    /// Looking up segment `seg` while block `blk` is being counted down.
    Lookup { seg: usize, blk: usize },
}

struct Asm {
    b: MachineBuilder,
    one: Value,
    counter: usize,
}

impl Asm {
    fn st(&mut self, base: &str) -> usize {
        self.counter += 1;
        self.b.state(&format!("{base}{}", self.counter))
    }

    fn tw(&mut self, p: usize, a: &str, q: usize, c: &str, d: Move, w: Value) {
        let a = self.b.symbol(a);
        let c = self.b.symbol(c);
        self.b.add(p, a, q, c, d, w);
    }

    fn t(&mut self, p: usize, a: &str, q: usize, c: &str, d: Move) {
        let one = self.one.clone();
        self.tw(p, a, q, c, d, one);
    }

    /// Keep moving in direction `d` over `syms`.
    fn pass(&mut self, q: usize, syms: &[String], d: Move) {
        for a in syms {
            self.t(q, a, q, a, d);
        }
    }

    /// From `$` in state `k`, scan right to the first cell of `regs[target]`
    /// (or of the cell after the last region, which reads one of `end`).
    fn goto(&mut self, k: usize, regs: &[Reg], target: usize, end: &[&str]) -> usize {
        let at = self.st("at");
        let first = |i: usize| -> Vec<String> {
            if i == regs.len() {
                strs(end)
            } else {
                match &regs[i] {
                    Reg::Sep(s) => vec![s.to_string()],
                    Reg::Plain(v) => v.clone(),
                    Reg::Seg { start, .. } => start.clone(),
                }
            }
        };
        let mut cur = if target == 0 { at } else { self.st("go") };
        self.t(k, "$", cur, "$", R);
        let mut in_body = false;
        for i in 0..=target {
            if in_body && i == target {
                for a in first(i) {
                    self.t(cur, &a, at, &a, S);
                }
                return at;
            }
            if i == target {
                debug_assert_eq!(cur, at);
                return at;
            }
            match &regs[i] {
                Reg::Sep(s) => {
                    let nxt = if i + 1 == target { at } else { self.st("go") };
                    self.t(cur, s, nxt, s, R);
                    cur = nxt;
                    in_body = false;
                }
                Reg::Seg { start, body } => {
                    let inside = self.st("go");
                    for a in start {
                        self.t(cur, a, inside, a, R);
                    }
                    self.pass(inside, body, R);
                    cur = inside;
                    in_body = true;
                }
                Reg::Plain(v) => {
                    assert!(!in_body, "plain region must follow a separator");
                    self.pass(cur, v, R);
                    in_body = true;
                }
            }
        }
        unreachable!()
    }

    /// A state that scans left over `current` and the regions `left`, then
    /// hands over to `next` on `$`.
    fn home(&mut self, next: usize, left: &[Reg], current: &[String]) -> usize {
        let h = self.st("home");
        let mut syms: BTreeSet<String> = current.iter().cloned().collect();
        for r in left {
            syms.extend(r.all());
        }
        for a in &syms {
            self.t(h, a, h, a, L);
        }
        self.t(h, "$", next, "$", S);
        h
    }
}

struct Compiler {
    asm: Asm,
    semiring: Semiring,
    /// Arity of every segment: input relations, free relations, guessed relations.
    arity: Vec<usize>,
    n_input: usize,
    blocks: usize,
    /// Segment of each relation symbol or second-order variable.
    seg_of: BTreeMap<String, usize>,
    /// Block of each (renamed-apart) first-order variable.
    blk_of: BTreeMap<String, usize>,
}

/// Compile a wESO sentence over `sig` into a weighted Turing machine over
/// the input alphabet `{0,1}`.
///
/// Free second-order variables are read from the input after `enc(𝔄)`, in
/// name order. Free first-order variables and element constants are not
/// supported.
pub fn formula_to_wtm(phi: &Formula, sig: &Signature, sr: &Semiring) -> Result<WeightedTm, FaginError> {
    check_fragment(phi, Fragment::WEso)?;
    check_well_formed(phi, &WfOptions::with_signature(sig))?;
    let free = phi.free_vars();
    if let Some(x) = free.fo.iter().next() {
        return Err(FaginError::Unsupported(format!("free first-order variable `{x}`")));
    }
    let mut guessed = Vec::new();
    let mut body = phi;
    while let Formula::SumSo(x, k, g) = body {
        guessed.push((x.clone(), *k));
        body = g;
    }
    let body = rename_apart(body);
    let mut segs: Vec<(String, usize)> = if sig.is_empty() {
        vec![(String::new(), 1)]
    } else {
        sig.iter().map(|(r, k)| (r.to_string(), k)).collect()
    };
    segs.extend(free.so.iter().map(|(x, k)| (x.clone(), *k)));
    let n_input = segs.len();
    segs.extend(guessed.iter().cloned());
    let mut seg_of = BTreeMap::new();
    for (i, (name, _)) in segs.iter().enumerate() {
        // An inner `⨁X` shadows an outer one of the same name.
        seg_of.insert(name.clone(), i);
    }
    let mut blk_of = BTreeMap::new();
    let blocks = assign_blocks(&body, 0, &mut blk_of)?;
    let arity: Vec<usize> = segs.iter().map(|(_, k)| *k).collect();
    let one = sr.one();
    let mut b = MachineBuilder::new(sr.clone(), "_", "q0");
    b.input_symbol("0");
    b.input_symbol("1");
    let mut c = Compiler {
        asm: Asm { b, one, counter: 0 },
        semiring: sr.clone(),
        arity,
        n_input,
        blocks,
        seg_of,
        blk_of,
    };
    let k = c.setup(&guessed);
    let acc = c.asm.st("accept");
    c.asm.b.accept(acc);
    c.weighted(&body, k, acc)?;
    let m = c.asm.b.build()?;
    Ok(m.trim())
}

fn assign_blocks(f: &Formula, depth: usize, out: &mut BTreeMap<String, usize>) -> Result<usize, FaginError> {
    use Formula::*;
    match f {
        ExistsFo(x, g) | ForallFo(x, g) | SumFo(x, g) | ProdFo(x, g) => {
            out.insert(x.clone(), depth);
            assign_blocks(g, depth + 1, out)
        }
        Tc(_) | Dtc(_) | Fix(..) | ExistsSo(..) | SumSo(..) | ProdSo(..) => {
            Err(FaginError::Unsupported(format!("`{f}` inside a wESO body")))
        }
        _ => {
            let mut m = depth;
            for c in f.children() {
                m = m.max(assign_blocks(c, depth, out)?);
            }
            Ok(m)
        }
    }
}

impl Compiler {
    // ----- main layout -----

    fn seg_reg(&self, j: usize, d: &Dirt) -> Reg {
        let mut start = strs(&["s0", "s1"]);
        let mut body = strs(&["0", "1"]);
        if d.seg == Some(j) {
            start.extend(strs(&["w0", "w1"]));
            body.extend(strs(&["v0", "v1"]));
        }
        Reg::Seg { start, body }
    }

    fn block_syms(&self, b: usize, d: &Dirt) -> Vec<String> {
        let mut v = strs(&["o", "O"]);
        if d.blocks.contains(&b) {
            v.push("p".into());
        }
        v
    }

    fn ruler_syms(mask: u32) -> Vec<String> {
        submasks(mask).into_iter().map(rcell).collect()
    }

    fn regs(&self, d: &Dirt) -> Vec<Reg> {
        let mut v: Vec<Reg> = (0..self.n_input).map(|j| self.seg_reg(j, d)).collect();
        v.push(Reg::Sep("#"));
        v.push(Reg::Plain(Self::ruler_syms(d.tracks)));
        v.push(Reg::Sep("|"));
        for b in 0..self.blocks {
            v.push(Reg::Plain(self.block_syms(b, d)));
            v.push(Reg::Sep("|"));
        }
        for j in self.n_input..self.arity.len() {
            v.push(self.seg_reg(j, d));
        }
        v
    }

    fn seg_idx(&self, j: usize) -> usize {
        if j < self.n_input {
            j
        } else {
            self.n_input + 3 + 2 * self.blocks + (j - self.n_input)
        }
    }

    fn ruler_idx(&self) -> usize {
        self.n_input + 1
    }

    fn block_idx(&self, b: usize) -> usize {
        self.n_input + 3 + 2 * b
    }

    // ----- setup -----

    fn setup(&mut self, guessed: &[(String, usize)]) -> usize {
        let a = &mut self.asm;
        let q0 = a.b.state("q0");
        let f = [a.st("first"), a.st("first")];
        let c = [a.st("carry"), a.st("carry")];
        let h = a.st("hash");
        let search = a.st("search");
        for x in 0..2 {
            a.t(q0, &bit(x), f[x], "$", R);
            for y in 0..2 {
                a.t(f[x], &bit(y), c[y], &start(x), R);
                a.t(c[x], &bit(y), c[y], &bit(x), R);
            }
            if self.n_input == 1 {
                a.t(f[x], "_", h, &start(x), R);
            }
            a.t(c[x], "_", h, &bit(x), R);
        }
        let back = a.home(search, &[Reg::Plain(clean_data())], &[]);
        a.t(h, "_", back, "#", L);
        let build = self.search(search);
        let k = self.build(build);
        self.guess(k, guessed)
    }

    /// Try `n = 1, 2, …` until the input segments exactly fill the data.
    fn search(&mut self, s: usize) -> usize {
        let regs = [Reg::Plain(clean_data()), Reg::Sep("#"), Reg::Plain(vec![rcell(0)])];
        let at = self.asm.goto(s, &regs, 3, &["_"]);
        let mut k = self.asm.st("check");
        let h = self.asm.home(k, &regs, &[]);
        self.asm.t(at, "_", h, &rcell(0), L);
        let vis = [Reg::Plain(visited_data())];
        for t in 0..self.n_input {
            if t > 0 {
                let at = self.asm.goto(k, &vis, 1, &["0", "1"]);
                k = self.asm.st("mark");
                let h = self.asm.home(k, &vis, &[]);
                for x in 0..2 {
                    self.asm.t(at, &bit(x), h, &start(x), L);
                }
            }
            let next = self.asm.st("seg");
            self.repeat(k, self.arity[t] as u32, Phase::Search, next);
            k = next;
        }
        let at = self.asm.goto(k, &vis, 1, &["#", "0", "1"]);
        let keep = self.asm.st("found");
        let wipe = self.asm.st("retry");
        let fix = self.asm.st("fix");
        let done = self.asm.st("build");
        self.asm.t(at, "#", keep, "#", L);
        for x in 0..2 {
            self.asm.t(at, &bit(x), wipe, &bit(x), L);
            self.asm.t(keep, &visited(x), keep, &bit(x), L);
            self.asm.t(keep, &vstart(x), keep, &start(x), L);
            self.asm.t(wipe, &visited(x), wipe, &bit(x), L);
            self.asm.t(wipe, &vstart(x), wipe, &bit(x), L);
            self.asm.t(fix, &bit(x), s, &start(x), L);
        }
        self.asm.t(keep, "$", done, "$", S);
        self.asm.t(wipe, "$", fix, "$", R);
        done
    }

    fn build_regs(&self, done: usize, mask: u32, partial: bool) -> Vec<Reg> {
        let mut v = vec![Reg::Plain(clean_data()), Reg::Sep("#"), Reg::Plain(Self::ruler_syms(mask)), Reg::Sep("|")];
        for _ in 0..done {
            v.push(Reg::Plain(strs(&["o", "O"])));
            v.push(Reg::Sep("|"));
        }
        if partial {
            v.push(Reg::Plain(strs(&["o", "O"])));
        }
        v
    }

    /// Close the ruler with `|` and append one block per quantifier depth.
    fn build(&mut self, k: usize) -> usize {
        let regs = [Reg::Plain(clean_data()), Reg::Sep("#"), Reg::Plain(vec![rcell(0)])];
        let at = self.asm.goto(k, &regs, 3, &["_"]);
        let mut k = self.asm.st("blocks");
        let h = self.asm.home(k, &regs, &[]);
        self.asm.t(at, "_", h, "|", L);
        for b in 0..self.blocks {
            let regs = self.build_regs(b, 0, false);
            let at = self.asm.goto(k, &regs, regs.len(), &["_"]);
            let fill = self.asm.st("fill");
            let h = self.asm.home(fill, &regs, &[]);
            self.asm.t(at, "_", h, "*", L);
            let close = self.asm.st("close");
            self.repeat(fill, 1, Phase::Build { done: b }, close);
            let regs = self.build_regs(b, 0, true);
            let at = self.asm.goto(close, &regs, regs.len(), &["_"]);
            k = self.asm.st("blocks");
            let h = self.asm.home(k, &regs, &[]);
            self.asm.t(at, "_", h, "|", L);
        }
        k
    }

    fn guess_regs(&self, mask: u32, data2: bool) -> Vec<Reg> {
        let mut v = self.build_regs(self.blocks, mask, false);
        if data2 {
            v.push(Reg::Plain(clean_data()));
        }
        v
    }

    /// Append one guessed segment per leading `⨁X`.
    fn guess(&mut self, mut k: usize, guessed: &[(String, usize)]) -> usize {
        for (j, (_, l)) in guessed.iter().enumerate() {
            let regs = self.guess_regs(0, j > 0);
            let at = self.asm.goto(k, &regs, regs.len(), &["_"]);
            let fill = self.asm.st("guess");
            let h = self.asm.home(fill, &regs, &[]);
            self.asm.t(at, "_", h, "*", L);
            k = self.asm.st("guessed");
            self.repeat(fill, *l as u32, Phase::Guess, k);
        }
        k
    }

    // ----- loops over the ruler -----

    fn phase_regs(&self, ph: Phase, mask: u32) -> (Vec<Reg>, usize, &'static str) {
        match ph {
            Phase::Search => {
                let all: Vec<String> = clean_data().into_iter().chain(visited_data()).collect();
                (vec![Reg::Plain(all), Reg::Sep("#"), Reg::Plain(Self::ruler_syms(mask))], 2, "_")
            }
            Phase::Build { done } => (self.build_regs(done, mask, true), 2, "|"),
            Phase::Guess => (self.guess_regs(mask, true), 2, "|"),
            Phase::Lookup { seg, blk } => {
                let d = Dirt { seg: Some(seg), blocks: [blk].into_iter().collect(), tracks: mask };
                (self.regs(&d), self.ruler_idx(), "|")
            }
        }
    }

    /// Run the innermost step of `ph` `n^m` times, then continue at `done`.
    fn repeat(&mut self, k: usize, m: u32, ph: Phase, done: usize) {
        if m == 0 {
            self.innermost(k, ph, 0, done);
        } else {
            self.rloop(k, m, 0, ph, done);
        }
    }

    fn rloop(&mut self, k: usize, m: u32, outer: u32, ph: Phase, done: usize) {
        let mask = outer | track(m);
        let (regs, ri, end) = self.phase_regs(ph, mask);
        let at = self.asm.goto(k, &regs, ri, &[]);
        let inner = self.asm.st("iter");
        let set: Vec<u32> = submasks(mask).into_iter().filter(|s| s & track(m) != 0).collect();
        let set_syms: Vec<String> = set.iter().map(|&s| rcell(s)).collect();
        let h = self.asm.home(inner, &regs[..ri], &set_syms);
        for s in submasks(mask) {
            if s & track(m) != 0 {
                self.asm.t(at, &rcell(s), at, &rcell(s), R);
            } else {
                self.asm.t(at, &rcell(s), h, &rcell(s | track(m)), L);
            }
        }
        let clear = self.asm.st("clear");
        self.asm.t(at, end, clear, end, L);
        for &s in &set {
            self.asm.t(clear, &rcell(s), clear, &rcell(s & !track(m)), L);
        }
        let hc = self.asm.home(done, &regs[..ri - 1], &[]);
        self.asm.t(clear, "#", hc, "#", L);
        if m == 1 {
            self.innermost(inner, ph, mask, k);
        } else {
            self.rloop(inner, m - 1, mask, ph, k);
        }
    }

    fn innermost(&mut self, k: usize, ph: Phase, mask: u32, back: usize) {
        match ph {
            Phase::Search => {
                let vis = [Reg::Plain(visited_data())];
                let at = self.asm.goto(k, &vis, 1, &["0", "1", "s0", "s1"]);
                let h = self.asm.home(back, &vis, &[]);
                for x in 0..2 {
                    self.asm.t(at, &bit(x), h, &visited(x), L);
                    self.asm.t(at, &start(x), h, &vstart(x), L);
                }
            }
            Phase::Build { .. } => {
                let (regs, _, _) = self.phase_regs(ph, mask);
                let at = self.asm.goto(k, &regs, regs.len(), &["*", "_"]);
                let h = self.asm.home(back, &regs, &[]);
                self.asm.t(at, "*", h, "O", L);
                self.asm.t(at, "_", h, "o", L);
            }
            Phase::Guess => {
                let (regs, _, _) = self.phase_regs(ph, mask);
                let at = self.asm.goto(k, &regs, regs.len(), &["*", "_"]);
                let h = self.asm.home(back, &regs, &[]);
                for x in 0..2 {
                    self.asm.t(at, "*", h, &start(x), L);
                    self.asm.t(at, "_", h, &bit(x), L);
                }
            }
            Phase::Lookup { seg, .. } => {
                let (regs, _, _) = self.phase_regs(ph, mask);
                let si = self.seg_idx(seg);
                let at = self.asm.goto(k, &regs, si, &[]);
                let skip = self.asm.st("skip");
                let h = self.asm.home(back, &regs[..si], &visited_data());
                for x in 0..2 {
                    self.asm.t(at, &start(x), h, &vstart(x), L);
                    self.asm.t(at, &vstart(x), skip, &vstart(x), R);
                    self.asm.t(skip, &visited(x), skip, &visited(x), R);
                    self.asm.t(skip, &bit(x), h, &visited(x), L);
                }
            }
        }
    }

    // ----- block routines -----

    /// Move the mark of block `b` one cell right, or report that it is on the last cell.
    fn advance(&mut self, k: usize, b: usize, adv: usize, last: usize) {
        let regs = self.regs(&Dirt::default());
        let bi = self.block_idx(b);
        let at = self.asm.goto(k, &regs, bi, &[]);
        let chk = self.asm.st("chk");
        let back = self.asm.st("restore");
        let o = strs(&["o"]);
        let h_adv = self.asm.home(adv, &regs[..bi], &o);
        let h_last = self.asm.home(last, &regs[..bi], &o);
        self.asm.t(at, "o", at, "o", R);
        self.asm.t(at, "O", chk, "o", R);
        self.asm.t(chk, "o", h_adv, "O", L);
        self.asm.t(chk, "|", back, "|", L);
        self.asm.t(back, "o", h_last, "O", L);
    }

    /// Put the mark of block `b` back on the first cell.
    fn reset(&mut self, k: usize, b: usize, next: usize) {
        let regs = self.regs(&Dirt::default());
        let bi = self.block_idx(b);
        let at = self.asm.goto(k, &regs, bi, &[]);
        let rest = self.asm.st("rest");
        let h = self.asm.home(next, &regs[..bi], &strs(&["o", "O"]));
        self.asm.t(at, "o", rest, "O", R);
        self.asm.t(at, "O", rest, "O", R);
        self.asm.t(rest, "o", rest, "o", R);
        self.asm.t(rest, "O", rest, "o", R);
        self.asm.t(rest, "|", h, "|", L);
    }

    /// Nondeterministically move the mark of block `b` (on the first cell)
    /// to any cell; one run per position.
    fn choose(&mut self, k: usize, b: usize, next: usize) {
        let regs = self.regs(&Dirt::default());
        let bi = self.block_idx(b);
        let at = self.asm.goto(k, &regs, bi, &[]);
        let g = self.asm.st("pick");
        let h = self.asm.home(next, &regs[..bi], &strs(&["o"]));
        self.asm.t(at, "O", h, "O", L);
        self.asm.t(at, "O", g, "o", R);
        self.asm.t(g, "o", h, "O", L);
        self.asm.t(g, "o", g, "o", R);
    }

    /// Turn the `p` prefix of block `b` back into `o`; the prefix ends at one of `stops`.
    fn clean_block(&mut self, k: usize, b: usize, stops: &[&str], dirty: &[usize], next: usize) {
        let regs = self.regs(&Dirt::blocks(dirty));
        let bi = self.block_idx(b);
        let at = self.asm.goto(k, &regs, bi, &[]);
        let h = self.asm.home(next, &regs[..bi], &strs(&["o"]));
        self.asm.t(at, "p", at, "o", R);
        for s in stops {
            self.asm.t(at, s, h, s, L);
        }
    }

    /// Compare the marks of blocks `x` and `y` by walking both in lockstep.
    fn compare(&mut self, k: usize, x: usize, y: usize, lt: usize, eq: usize, gt: usize) {
        let regs = self.regs(&Dirt::blocks(&[x, y]));
        let (bx, by) = (self.block_idx(x), self.block_idx(y));
        let p = strs(&["p"]);
        let ax = self.asm.goto(k, &regs, bx, &[]);
        let reached = self.asm.st("xdone");
        let stepped = self.asm.st("xstep");
        let h_reached = self.asm.home(reached, &regs[..bx], &p);
        let h_stepped = self.asm.home(stepped, &regs[..bx], &p);
        self.asm.t(ax, "p", ax, "p", R);
        self.asm.t(ax, "O", h_reached, "O", L);
        self.asm.t(ax, "o", h_stepped, "p", L);

        let ay = self.asm.goto(reached, &regs, by, &[]);
        let c_eq = self.asm.st("eq");
        let c_lt = self.asm.st("lt");
        let h_eq = self.asm.home(c_eq, &regs[..by], &p);
        let h_lt = self.asm.home(c_lt, &regs[..by], &p);
        self.asm.t(ay, "p", ay, "p", R);
        self.asm.t(ay, "O", h_eq, "O", L);
        self.asm.t(ay, "o", h_lt, "o", L);

        let ay = self.asm.goto(stepped, &regs, by, &[]);
        let c_gt = self.asm.st("gt");
        let h_gt = self.asm.home(c_gt, &regs[..by], &p);
        let h_loop = self.asm.home(k, &regs[..by], &p);
        self.asm.t(ay, "p", ay, "p", R);
        self.asm.t(ay, "O", h_gt, "O", L);
        self.asm.t(ay, "o", h_loop, "p", L);

        for (c, xs, ys, out) in [(c_eq, &["O"][..], &["O"][..], eq), (c_lt, &["O"], &["o"], lt), (c_gt, &["O", "o"], &["O"], gt)] {
            let mid = self.asm.st("cleaned");
            self.clean_block(c, x, xs, &[x, y], mid);
            self.clean_block(mid, y, ys, &[y], out);
        }
    }

    // ----- atoms -----

    /// Read the bit of segment `seg` at the tuple held by `vars`.
    fn lookup(&mut self, k: usize, seg: usize, vars: &[usize], yes: usize, no: usize) {
        let a = vars.len();
        let mut k = k;
        for (j, &b) in vars.iter().enumerate() {
            let m = (a - 1 - j) as u32;
            let d = Dirt { seg: Some(seg), blocks: [b].into_iter().collect(), tracks: 0 };
            let regs = self.regs(&d);
            let bi = self.block_idx(b);
            let at = self.asm.goto(k, &regs, bi, &[]);
            let reached = self.asm.st("counted");
            let step = self.asm.st("count");
            let p = strs(&["p"]);
            let h_done = self.asm.home(reached, &regs[..bi], &p);
            let h_step = self.asm.home(step, &regs[..bi], &p);
            self.asm.t(at, "p", at, "p", R);
            self.asm.t(at, "O", h_done, "O", L);
            self.asm.t(at, "o", h_step, "p", L);
            self.repeat(step, m, Phase::Lookup { seg, blk: b }, k);
            let next = self.asm.st("digit");
            let regs_clean = self.regs(&Dirt { seg: Some(seg), blocks: [b].into_iter().collect(), tracks: 0 });
            let bi = self.block_idx(b);
            let at = self.asm.goto(reached, &regs_clean, bi, &[]);
            let h = self.asm.home(next, &regs_clean[..bi], &strs(&["o"]));
            self.asm.t(at, "p", at, "o", R);
            self.asm.t(at, "O", h, "O", L);
            k = next;
        }
        let regs = self.regs(&Dirt::seg(seg));
        let si = self.seg_idx(seg);
        let at = self.asm.goto(k, &regs, si, &[]);
        let skip = self.asm.st("find");
        let clean_regs = self.regs(&Dirt::default());
        let outs = [no, yes];
        for x in 0..2 {
            let h = self.asm.home(outs[x], &clean_regs[..si], &[]);
            let wipe = self.asm.st("wipe");
            self.asm.t(at, &start(x), h, &start(x), L);
            self.asm.t(at, &vstart(x), skip, &vstart(x), R);
            self.asm.t(skip, &visited(x), skip, &visited(x), R);
            self.asm.t(skip, &bit(x), wipe, &bit(x), L);
            for y in 0..2 {
                self.asm.t(wipe, &visited(y), wipe, &bit(y), L);
                self.asm.t(wipe, &vstart(y), h, &start(y), L);
            }
        }
    }

    fn block(&self, x: &str) -> Result<usize, FaginError> {
        self.blk_of
            .get(x)
            .copied()
            .ok_or_else(|| FaginError::Unsupported(format!("`{x}` is not a bound variable")))
    }

    // ----- formulas -----

    fn boolean(&mut self, f: &Formula, k: usize, yes: usize, no: usize) -> Result<(), FaginError> {
        use Formula::*;
        match f {
            True | False => {
                let to = if matches!(f, True) { yes } else { no };
                self.asm.t(k, "$", to, "$", S);
            }
            Eq(x, y) | Less(x, y) => {
                let (bx, by) = (self.block(x)?, self.block(y)?);
                let is_eq = matches!(f, Eq(..));
                if bx == by {
                    let to = if is_eq { yes } else { no };
                    self.asm.t(k, "$", to, "$", S);
                } else if is_eq {
                    self.compare(k, bx, by, no, yes, no);
                } else {
                    self.compare(k, bx, by, yes, no, no);
                }
            }
            Rel(r, args) | So(r, args) => {
                let seg = *self.seg_of.get(r).ok_or_else(|| FaginError::Unsupported(format!("unknown symbol `{r}`")))?;
                let vars = args.iter().map(|x| self.block(x)).collect::<Result<Vec<_>, _>>()?;
                self.lookup(k, seg, &vars, yes, no);
            }
            Not(g) => self.boolean(g, k, no, yes)?,
            And(a, b) => {
                let mid = self.asm.st("and");
                self.boolean(a, k, mid, no)?;
                self.boolean(b, mid, yes, no)?;
            }
            Or(a, b) => {
                let mid = self.asm.st("or");
                self.boolean(a, k, yes, mid)?;
                self.boolean(b, mid, yes, no)?;
            }
            Implies(a, b) => {
                let mid = self.asm.st("imp");
                self.boolean(a, k, mid, yes)?;
                self.boolean(b, mid, yes, no)?;
            }
            Iff(a, b) => {
                let (m1, m2) = (self.asm.st("iff"), self.asm.st("iff"));
                self.boolean(a, k, m1, m2)?;
                self.boolean(b, m1, yes, no)?;
                self.boolean(b, m2, no, yes)?;
            }
            ExistsFo(x, g) | ForallFo(x, g) => {
                let b = self.block(x)?;
                let exists = matches!(f, ExistsFo(..));
                let (hit, miss) = (self.asm.st("hit"), self.asm.st("miss"));
                self.boolean(g, k, hit, miss)?;
                let (stop, go_on, stop_out) = if exists { (hit, miss, yes) } else { (miss, hit, no) };
                self.reset(stop, b, stop_out);
                let last = self.asm.st("last");
                self.advance(go_on, b, k, last);
                let end_out = if exists { no } else { yes };
                self.reset(last, b, end_out);
            }
            _ => return Err(FaginError::Unsupported(format!("`{f}` in a Boolean position"))),
        }
        Ok(())
    }

    fn weighted(&mut self, f: &Formula, k: usize, exit: usize) -> Result<(), FaginError> {
        use Formula::*;
        if f.is_boolean() {
            let dead = self.asm.st("reject");
            return self.boolean(f, k, exit, dead);
        }
        match f {
            Const(c) => {
                let w = match c {
                    ConstLit::Zero => self.semiring.zero(),
                    ConstLit::One => self.semiring.one(),
                    ConstLit::Lit(s) => self
                        .semiring
                        .parse_literal(s)
                        .map_err(|e| FaginError::BadLiteral { lit: s.clone(), msg: e.to_string() })?,
                };
                self.asm.tw(k, "$", exit, "$", S, w);
            }
            OPlus(a, b) => {
                let (ka, kb) = (self.asm.st("left"), self.asm.st("right"));
                self.asm.t(k, "$", ka, "$", S);
                self.asm.t(k, "$", kb, "$", S);
                self.weighted(a, ka, exit)?;
                self.weighted(b, kb, exit)?;
            }
            OTimes(a, b) => {
                let mid = self.asm.st("then");
                self.weighted(a, k, mid)?;
                self.weighted(b, mid, exit)?;
            }
            Guard(c, g) => {
                let yes = self.asm.st("guarded");
                self.boolean(c, k, yes, exit)?;
                self.weighted(g, yes, exit)?;
            }
            ProdFo(x, g) => {
                let b = self.block(x)?;
                let after = self.asm.st("factor");
                let last = self.asm.st("last");
                self.weighted(g, k, after)?;
                self.advance(after, b, k, last);
                self.reset(last, b, exit);
            }
            SumFo(x, g) => {
                let b = self.block(x)?;
                let chosen = self.asm.st("chosen");
                let after = self.asm.st("term");
                self.choose(k, b, chosen);
                self.weighted(g, chosen, after)?;
                self.reset(after, b, exit);
            }
            _ => return Err(FaginError::Unsupported(format!("`{f}` in a wESO body"))),
        }
        Ok(())
    }
}
