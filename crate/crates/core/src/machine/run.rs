use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap, FxHashSet};

use super::{Configuration, MachineError, WeightedTm};
use crate::semiring::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_steps: usize,
    /// Report branches still running at `max_steps` as an error.
    pub strict: bool,
}

impl RunOptions {
    pub fn new(max_steps: usize) -> Self {
        RunOptions { max_steps, strict: false }
    }

    pub fn strict(max_steps: usize) -> Self {
        RunOptions { max_steps, strict: true }
    }
}

/// An accepting computation: the configurations visited and the transitions taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Computation {
    pub configs: Vec<Configuration>,
    pub steps: Vec<usize>,
}

impl Computation {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `ν(e₁)·…·ν(eₙ)`, multiplied left to right; 𝟙 for the empty computation.
    pub fn weight(&self, m: &WeightedTm) -> Value {
        let sr = m.semiring();
        self.steps.iter().fold(sr.one(), |acc, &e| sr.mul(&acc, &m.transitions()[e].weight))
    }
}

/// All accepting computations of length at most `max_steps`, by depth-first search.
pub fn computations(m: &WeightedTm, w: &[usize], opts: RunOptions) -> Result<Vec<Computation>, MachineError> {
    let mut out = Vec::new();
    let mut live = 0;
    let mut path = Computation { configs: vec![m.initial_config(w)], steps: Vec::new() };
    dfs(m, &mut path, opts.max_steps, &mut out, &mut live);
    if opts.strict && live > 0 {
        return Err(MachineError::LiveBranches { steps: opts.max_steps, live });
    }
    Ok(out)
}

fn successors(m: &WeightedTm, c: &Configuration) -> Vec<(usize, Configuration)> {
    m.applicable(c.state, c.read(m.blank()))
        .iter()
        .filter_map(|&e| m.step(c, e).ok().map(|d| (e, d)))
        .collect()
}

fn dfs(m: &WeightedTm, path: &mut Computation, budget: usize, out: &mut Vec<Computation>, live: &mut usize) {
    let c = path.configs.last().expect("nonempty path").clone();
    if m.is_accepting(c.state) {
        out.push(path.clone());
        return;
    }
    let next = successors(m, &c);
    if budget == 0 {
        if !next.is_empty() {
            *live += 1;
        }
        return;
    }
    for (e, d) in next {
        path.steps.push(e);
        path.configs.push(d);
        dfs(m, path, budget - 1, out, live);
        path.steps.pop();
        path.configs.pop();
    }
}

/// `‖M‖(w)`: the sum of the weights of accepting computations of length at
/// most `max_steps`.
///
/// Computed layer by layer: configurations reached at the same time are
/// merged and carry the sum of the weights of the partial runs reaching
/// them, which right distributivity makes equal to the path sum.
pub fn behavior(m: &WeightedTm, w: &[usize], opts: RunOptions) -> Result<Value, MachineError> {
    let sr = m.semiring();
    let mut total = sr.zero();
    let mut layer: FxHashMap<Configuration, Value> = FxHashMap::default();
    layer.insert(m.initial_config(w), sr.one());
    for t in 0..=opts.max_steps {
        let mut next: FxHashMap<Configuration, Value> = FxHashMap::default();
        let mut live = 0;
        for (c, wc) in &layer {
            if m.is_accepting(c.state) {
                total = sr.add(&total, wc);
                continue;
            }
            let succ = successors(m, c);
            if t == opts.max_steps {
                if !succ.is_empty() {
                    live += 1;
                }
                continue;
            }
            for (e, d) in succ {
                let v = sr.mul(wc, &m.transitions()[e].weight);
                if sr.is_zero(&v) && !opts.strict {
                    continue;
                }
                match next.get_mut(&d) {
                    Some(acc) => *acc = sr.add(acc, &v),
                    None => {
                        next.insert(d, v);
                    }
                }
            }
        }
        if opts.strict && live > 0 {
            return Err(MachineError::LiveBranches { steps: opts.max_steps, live });
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(total)
}

/// The length of the longest computation on `w`, accepting or not. Outside
/// strict mode a machine still running at `max_steps` reports `max_steps`.
pub fn time_meter(m: &WeightedTm, w: &[usize], opts: RunOptions) -> Result<usize, MachineError> {
    let mut layer: FxHashSet<Configuration> = FxHashSet::default();
    layer.insert(m.initial_config(w));
    for t in 0..opts.max_steps {
        let mut next = FxHashSet::default();
        for c in &layer {
            if !m.is_accepting(c.state) {
                next.extend(successors(m, c).into_iter().map(|(_, d)| d));
            }
        }
        if next.is_empty() {
            return Ok(t);
        }
        layer = next;
    }
    let live = layer.iter().filter(|c| !m.is_accepting(c.state) && !successors(m, c).is_empty()).count();
    if opts.strict && live > 0 {
        return Err(MachineError::LiveBranches { steps: opts.max_steps, live });
    }
    Ok(opts.max_steps)
}

struct Move1 {
    id: usize,
    to: u32,
    write: u32,
    dir: i8,
    /// `None` for 𝟙.
    weight: Option<Value>,
}

#[derive(Clone)]
struct Cfg {
    state: u32,
    head: usize,
    tape: Vec<u32>,
}

impl Cfg {
    fn key(&self, blank: u32) -> Vec<u32> {
        let mut end = self.tape.len();
        while end > 0 && self.tape[end - 1] == blank {
            end -= 1;
        }
        let mut k = Vec::with_capacity(end + 2);
        k.push(self.state);
        k.push(self.head as u32);
        k.extend_from_slice(&self.tape[..end]);
        k
    }
}

enum Stretch {
    Done { value: Option<Value>, len: usize },
    Branch { cfg: Cfg, prefix: Option<Value>, len: usize },
}

struct Frame {
    key: Vec<u32>,
    cfg: Cfg,
    moves: Vec<usize>,
    idx: usize,
    total: Value,
    height: usize,
    depth: usize,
    waiting: Option<(Option<Value>, usize)>,
}

struct Dfs<'a> {
    m: &'a WeightedTm,
    nsym: usize,
    blank: u32,
    ranges: Vec<(u32, u32)>,
    moves: Vec<Move1>,
    max: usize,
}

impl<'a> Dfs<'a> {
    fn new(m: &'a WeightedTm, max: usize, skip_zero: bool) -> Self {
        let nsym = m.symbols().len();
        let nst = m.states().len();
        let one = m.semiring().one();
        let mut ranges = vec![(0, 0); nst * nsym];
        let mut moves = Vec::with_capacity(m.transitions().len());
        for q in 0..nst {
            for a in 0..nsym {
                let lo = moves.len() as u32;
                for &e in m.applicable(q, a) {
                    let t = &m.transitions()[e];
                    if skip_zero && m.semiring().is_zero(&t.weight) {
                        continue;
                    }
                    moves.push(Move1 {
                        id: e,
                        to: t.to as u32,
                        write: t.write as u32,
                        dir: t.dir.as_int() as i8,
                        weight: (t.weight != one).then(|| t.weight.clone()),
                    });
                }
                ranges[q * nsym + a] = (lo, moves.len() as u32);
            }
        }
        Dfs { m, nsym, blank: m.blank() as u32, ranges, moves, max }
    }

    fn mul(&self, a: Option<Value>, b: &Option<Value>) -> Option<Value> {
        match (a, b) {
            (a, None) => a,
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(self.m.semiring().mul(&a, b)),
        }
    }

    fn applicable(&self, c: &Cfg) -> std::ops::Range<usize> {
        let a = c.tape.get(c.head).copied().unwrap_or(self.blank);
        let (lo, hi) = self.ranges[c.state as usize * self.nsym + a as usize];
        lo as usize..hi as usize
    }

    fn apply(&self, c: &mut Cfg, mv: usize) -> bool {
        let mv = &self.moves[mv];
        if mv.dir < 0 && c.head == 0 {
            return false;
        }
        if c.head >= c.tape.len() {
            c.tape.resize(c.head + 1, self.blank);
        }
        c.tape[c.head] = mv.write;
        c.state = mv.to;
        c.head = (c.head as isize + mv.dir as isize) as usize;
        true
    }

    fn live(&self, c: &Cfg) -> Vec<usize> {
        self.applicable(c).filter(|&e| !(self.moves[e].dir < 0 && c.head == 0)).collect()
    }

    /// Run deterministic steps until the machine halts or branches.
    fn stretch(&self, mut c: Cfg, depth: usize, mut path: Option<&mut Vec<usize>>) -> Result<Stretch, MachineError> {
        let mut prefix: Option<Value> = None;
        let mut len = 0;
        loop {
            if self.m.is_accepting(c.state as usize) {
                return Ok(Stretch::Done { value: Some(prefix.unwrap_or_else(|| self.m.semiring().one())), len });
            }
            let r = self.applicable(&c);
            let live = r.clone().filter(|&e| !(self.moves[e].dir < 0 && c.head == 0)).count();
            if live == 0 {
                return Ok(Stretch::Done { value: None, len });
            }
            if depth + len >= self.max {
                return Err(MachineError::LiveBranches { steps: self.max, live: 1 });
            }
            if live > 1 {
                return Ok(Stretch::Branch { cfg: c, prefix, len });
            }
            let e = r.into_iter().find(|&e| !(self.moves[e].dir < 0 && c.head == 0)).expect("one live move");
            prefix = self.mul(prefix, &self.moves[e].weight);
            if let Some(p) = path.as_deref_mut() {
                p.push(self.moves[e].id);
            }
            self.apply(&mut c, e);
            len += 1;
        }
    }
}

/// `‖M‖(w)` for a machine all of whose computations on `w` halt within
/// `max_steps` steps; a computation still running at that point is an error.
///
/// Deterministic stretches run in place and configurations where the
/// machine branches are memoized, so branches that converge are explored
/// once. Weights are multiplied in time order.
pub fn total_behavior(m: &WeightedTm, w: &[usize], max_steps: usize) -> Result<Value, MachineError> {
    let dfs = Dfs::new(m, max_steps, false);
    let sr = m.semiring();
    let zero = sr.zero();
    let lift = |v: Option<Value>| v.unwrap_or_else(|| zero.clone());
    let start = Cfg { state: m.initial() as u32, head: 0, tape: w.iter().map(|&s| s as u32).collect() };
    let (root_prefix, cfg, len) = match dfs.stretch(start, 0, None)? {
        Stretch::Done { value, .. } => return Ok(lift(value)),
        Stretch::Branch { cfg, prefix, len } => (prefix, cfg, len),
    };
    let mut memo: FxHashMap<Vec<u32>, (Value, usize)> = FxHashMap::default();
    let frame = |cfg: Cfg, depth: usize| Frame {
        key: cfg.key(dfs.blank),
        moves: dfs.live(&cfg),
        cfg,
        idx: 0,
        total: zero.clone(),
        height: 0,
        depth,
        waiting: None,
    };
    let mut stack = vec![frame(cfg, len)];
    loop {
        let top = stack.last_mut().expect("nonempty stack");
        if top.idx == top.moves.len() {
            let done = stack.pop().expect("nonempty stack");
            memo.insert(done.key, (done.total.clone(), done.height));
            match stack.last_mut() {
                None => return Ok(lift(dfs.mul(root_prefix, &Some(done.total)))),
                Some(parent) => {
                    let (pw, plen) = parent.waiting.take().expect("parent waits");
                    let v = lift(dfs.mul(pw, &Some(done.total)));
                    parent.total = sr.add(&parent.total, &v);
                    parent.height = parent.height.max(plen + done.height);
                }
            }
            continue;
        }
        let e = top.moves[top.idx];
        top.idx += 1;
        let mut child = top.cfg.clone();
        dfs.apply(&mut child, e);
        let depth = top.depth + 1;
        let w = dfs.moves[e].weight.clone();
        match dfs.stretch(child, depth, None)? {
            Stretch::Done { value, len } => {
                if let Some(v) = value {
                    let v = lift(dfs.mul(w, &Some(v)));
                    top.total = sr.add(&top.total, &v);
                }
                top.height = top.height.max(1 + len);
            }
            Stretch::Branch { cfg, prefix, len } => {
                let pw = dfs.mul(w, &prefix);
                let key = cfg.key(dfs.blank);
                if let Some((v, h)) = memo.get(&key) {
                    if depth + len + h > max_steps {
                        return Err(MachineError::LiveBranches { steps: max_steps, live: 1 });
                    }
                    let v = lift(dfs.mul(pw, &Some(v.clone())));
                    top.total = sr.add(&top.total, &v);
                    top.height = top.height.max(1 + len + h);
                } else {
                    top.waiting = Some((pw, 1 + len));
                    let f = frame(cfg, depth + len);
                    stack.push(f);
                }
            }
        }
    }
}

struct SupportFrame {
    key: Vec<u32>,
    cfg: Cfg,
    moves: Vec<usize>,
    idx: usize,
    alive: bool,
    depth: usize,
    waiting: Vec<usize>,
}

/// Transitions occurring in some accepting computation on `w` all of whose
/// transitions have nonzero weight. Same halting assumption as
/// [`total_behavior`].
pub fn nonzero_support(m: &WeightedTm, w: &[usize], max_steps: usize) -> Result<FixedBitSet, MachineError> {
    let dfs = Dfs::new(m, max_steps, true);
    let mut used = FixedBitSet::with_capacity(m.transitions().len());
    let start = Cfg { state: m.initial() as u32, head: 0, tape: w.iter().map(|&s| s as u32).collect() };
    let mut path = Vec::new();
    let (cfg, len) = match dfs.stretch(start, 0, Some(&mut path))? {
        Stretch::Done { value, .. } => {
            if value.is_some() {
                path.iter().for_each(|&e| used.insert(e));
            }
            return Ok(used);
        }
        Stretch::Branch { cfg, len, .. } => (cfg, len),
    };
    let root_path = path;
    let mut memo: FxHashMap<Vec<u32>, (bool, usize)> = FxHashMap::default();
    let frame = |cfg: Cfg, depth: usize| SupportFrame {
        key: cfg.key(dfs.blank),
        moves: dfs.live(&cfg),
        cfg,
        idx: 0,
        alive: false,
        depth,
        waiting: Vec::new(),
    };
    let mut stack = vec![frame(cfg, len)];
    let mut heights = vec![0usize];
    loop {
        let top = stack.last_mut().expect("nonempty stack");
        if top.idx == top.moves.len() {
            let done = stack.pop().expect("nonempty stack");
            let h = heights.pop().expect("height per frame");
            memo.insert(done.key, (done.alive, h));
            match stack.last_mut() {
                None => {
                    if done.alive {
                        root_path.iter().for_each(|&e| used.insert(e));
                    }
                    return Ok(used);
                }
                Some(parent) => {
                    let plen = parent.waiting.len();
                    if done.alive {
                        parent.waiting.iter().for_each(|&e| used.insert(e));
                        parent.alive = true;
                    }
                    parent.waiting.clear();
                    let ph = heights.last_mut().expect("height per frame");
                    *ph = (*ph).max(plen + h);
                }
            }
            continue;
        }
        let e = top.moves[top.idx];
        top.idx += 1;
        let mut child = top.cfg.clone();
        dfs.apply(&mut child, e);
        let depth = top.depth + 1;
        let mut path = vec![dfs.moves[e].id];
        match dfs.stretch(child, depth, Some(&mut path))? {
            Stretch::Done { value, len } => {
                if value.is_some() {
                    path.iter().for_each(|&e| used.insert(e));
                    top.alive = true;
                }
                let ph = heights.last_mut().expect("height per frame");
                *ph = (*ph).max(1 + len);
            }
            Stretch::Branch { cfg, len, .. } => {
                let key = cfg.key(dfs.blank);
                if let Some(&(alive, h)) = memo.get(&key) {
                    if depth + len + h > max_steps {
                        return Err(MachineError::LiveBranches { steps: max_steps, live: 1 });
                    }
                    if alive {
                        path.iter().for_each(|&e| used.insert(e));
                        top.alive = true;
                    }
                    let ph = heights.last_mut().expect("height per frame");
                    *ph = (*ph).max(1 + len + h);
                } else {
                    top.waiting = path;
                    stack.push(frame(cfg, depth + len));
                    heights.push(0);
                }
            }
        }
    }
}
