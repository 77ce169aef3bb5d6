//! Weighted Turing machines with a one-way tape.
//!
//! The tape starts at cell 0 and extends to the right; a left move at cell
//! 0 is not applicable, so such branches simply die. A computation's weight
//! is the product of its transition weights in time order, and the
//! behavior on a word sums the weights of all accepting computations.

mod json;
mod pad;
mod run;
mod srtm;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use pad::{pad_machine, PaddedTm};
pub use run::{behavior, computations, nonzero_support, time_meter, total_behavior, Computation, RunOptions};
pub use srtm::{srtm_to_wtm, Srtm};

use crate::semiring::{Semiring, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown tape symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` is not in the input alphabet")]
    NotInput(String),
    #[error("the blank `{0}` must not be an input symbol")]
    BlankInInput(String),
    #[error("transition leaves accepting state `{0}`")]
    LeavesAccepting(String),
    #[error("duplicate transition ({0})")]
    DuplicateTransition(String),
    #[error("direction must be -1, 0 or 1, got {0}")]
    BadDirection(i64),
    #[error("weight `{lit}`: {msg}")]
    BadWeight { lit: String, msg: String },
    #[error("weight {0} is not an element of the machine's semiring")]
    ForeignWeight(String),
    #[error("transition is not applicable to the configuration")]
    Inapplicable,
    #[error("{live} configuration(s) still running after {steps} steps")]
    LiveBranches { steps: usize, live: usize },
    #[error("machine file: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn from_int(d: i64) -> Result<Move, MachineError> {
        match d {
            -1 => Ok(Move::Left),
            0 => Ok(Move::Stay),
            1 => Ok(Move::Right),
            other => Err(MachineError::BadDirection(other)),
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }
}

/// `(from, read) -> (to, write, dir)` with a weight. States and symbols are indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub read: usize,
    pub to: usize,
    pub write: usize,
    pub dir: Move,
    pub weight: Value,
}

impl Transition {
    fn key(&self) -> (usize, usize, usize, usize, Move) {
        (self.from, self.read, self.to, self.write, self.dir)
    }
}

#[derive(Clone, Debug)]
pub struct WeightedTm {
    semiring: Semiring,
    states: Vec<String>,
    symbols: Vec<String>,
    input: BTreeSet<usize>,
    blank: usize,
    initial: usize,
    accepting: BTreeSet<usize>,
    transitions: Vec<Transition>,
    by_head: HashMap<(usize, usize), Vec<usize>>,
}

/// Incremental construction with name interning.
#[derive(Clone, Debug)]
pub struct MachineBuilder {
    semiring: Semiring,
    states: Vec<String>,
    state_ids: HashMap<String, usize>,
    symbols: Vec<String>,
    symbol_ids: HashMap<String, usize>,
    input: BTreeSet<usize>,
    blank: usize,
    initial: usize,
    accepting: BTreeSet<usize>,
    transitions: Vec<Transition>,
}

impl MachineBuilder {
    /// A builder with the given blank symbol and initial state.
    pub fn new(semiring: Semiring, blank: &str, initial: &str) -> Self {
        let mut b = MachineBuilder {
            semiring,
            states: Vec::new(),
            state_ids: HashMap::new(),
            symbols: Vec::new(),
            symbol_ids: HashMap::new(),
            input: BTreeSet::new(),
            blank: 0,
            initial: 0,
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
        };
        b.blank = b.symbol(blank);
        b.initial = b.state(initial);
        b
    }

    pub fn semiring(&self) -> &Semiring {
        &self.semiring
    }

    pub fn state(&mut self, name: &str) -> usize {
        if let Some(&i) = self.state_ids.get(name) {
            return i;
        }
        self.states.push(name.to_string());
        self.state_ids.insert(name.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    /// A state with a name not used so far, derived from `base`.
    pub fn fresh_state(&mut self, base: &str) -> usize {
        let mut name = base.to_string();
        let mut i = self.states.len();
        while self.state_ids.contains_key(&name) {
            name = format!("{base}.{i}");
            i += 1;
        }
        self.state(&name)
    }

    pub fn symbol(&mut self, name: &str) -> usize {
        if let Some(&i) = self.symbol_ids.get(name) {
            return i;
        }
        self.symbols.push(name.to_string());
        self.symbol_ids.insert(name.to_string(), self.symbols.len() - 1);
        self.symbols.len() - 1
    }

    pub fn input_symbol(&mut self, name: &str) -> usize {
        let s = self.symbol(name);
        self.input.insert(s);
        s
    }

    pub fn accept(&mut self, q: usize) {
        self.accepting.insert(q);
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial = q;
    }

    pub fn add(&mut self, from: usize, read: usize, to: usize, write: usize, dir: Move, weight: Value) {
        self.transitions.push(Transition { from, read, to, write, dir, weight });
    }

    /// Add by names, interning as needed.
    pub fn add_named(&mut self, from: &str, read: &str, to: &str, write: &str, dir: Move, weight: Value) {
        let (p, a, q, b) = (self.state(from), self.symbol(read), self.state(to), self.symbol(write));
        self.add(p, a, q, b, dir, weight);
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn build(self) -> Result<WeightedTm, MachineError> {
        if self.input.contains(&self.blank) {
            return Err(MachineError::BlankInInput(self.symbols[self.blank].clone()));
        }
        let mut seen = HashMap::new();
        let mut by_head: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if self.accepting.contains(&t.from) {
                return Err(MachineError::LeavesAccepting(self.states[t.from].clone()));
            }
            if !self.semiring.contains(&t.weight) {
                return Err(MachineError::ForeignWeight(t.weight.to_string()));
            }
            if seen.insert(t.key(), i).is_some() {
                return Err(MachineError::DuplicateTransition(format!(
                    "{}, {}, {}, {}, {}",
                    self.states[t.from],
                    self.symbols[t.read],
                    self.states[t.to],
                    self.symbols[t.write],
                    t.dir.as_int()
                )));
            }
            by_head.entry((t.from, t.read)).or_default().push(i);
        }
        Ok(WeightedTm {
            semiring: self.semiring,
            states: self.states,
            symbols: self.symbols,
            input: self.input,
            blank: self.blank,
            initial: self.initial,
            accepting: self.accepting,
            transitions: self.transitions,
            by_head,
        })
    }
}

/// State, head position and tape contents. Cells past the stored tape are
/// blank; trailing blanks are never stored, so equal configurations compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: usize,
    pub head: usize,
    tape: Vec<usize>,
}

impl Configuration {
    pub fn new(state: usize, head: usize, tape: Vec<usize>, blank: usize) -> Self {
        let mut c = Configuration { state, head, tape };
        c.trim(blank);
        c
    }

    fn trim(&mut self, blank: usize) {
        while self.tape.last() == Some(&blank) {
            self.tape.pop();
        }
    }

    pub fn read(&self, blank: usize) -> usize {
        self.tape.get(self.head).copied().unwrap_or(blank)
    }

    pub fn cell(&self, i: usize, blank: usize) -> usize {
        self.tape.get(i).copied().unwrap_or(blank)
    }

    /// Stored cells; everything after them is blank.
    pub fn tape(&self) -> &[usize] {
        &self.tape
    }
}

impl WeightedTm {
    pub fn semiring(&self) -> &Semiring {
        &self.semiring
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn input_alphabet(&self) -> impl Iterator<Item = usize> + '_ {
        self.input.iter().copied()
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn symbol_id(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Indices of transitions for state `q` reading `a`.
    pub fn applicable(&self, q: usize, a: usize) -> &[usize] {
        self.by_head.get(&(q, a)).map_or(&[], Vec::as_slice)
    }

    /// A builder holding this machine's components, for extension.
    pub fn to_builder(&self) -> MachineBuilder {
        MachineBuilder {
            semiring: self.semiring.clone(),
            states: self.states.clone(),
            state_ids: self.states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect(),
            symbols: self.symbols.clone(),
            symbol_ids: self.symbols.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect(),
            input: self.input.clone(),
            blank: self.blank,
            initial: self.initial,
            accepting: self.accepting.clone(),
            transitions: self.transitions.clone(),
        }
    }

    /// Same machine with transition `i` reweighted.
    pub fn with_weight(&self, i: usize, w: Value) -> Result<WeightedTm, MachineError> {
        let mut b = self.to_builder();
        b.transitions[i].weight = w;
        b.build()
    }

    /// Split a word into input symbols. Symbol names of one character are
    /// matched per character; otherwise symbols are separated by spaces.
    pub fn word(&self, text: &str) -> Result<Vec<usize>, MachineError> {
        let single = self.input.iter().all(|&s| self.symbols[s].chars().count() == 1);
        let parts: Vec<String> = if single && !text.contains(' ') {
            text.chars().map(String::from).collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        parts
            .iter()
            .map(|p| match self.symbol_id(p) {
                Some(s) if self.input.contains(&s) => Ok(s),
                Some(_) => Err(MachineError::NotInput(p.clone())),
                None => Err(MachineError::UnknownSymbol(p.clone())),
            })
            .collect()
    }

    pub fn initial_config(&self, w: &[usize]) -> Configuration {
        Configuration::new(self.initial, 0, w.to_vec(), self.blank)
    }

    /// `C →_e C'`.
    pub fn step(&self, c: &Configuration, e: usize) -> Result<Configuration, MachineError> {
        let t = &self.transitions[e];
        if t.from != c.state || t.read != c.read(self.blank) {
            return Err(MachineError::Inapplicable);
        }
        let head = match t.dir {
            Move::Left => c.head.checked_sub(1).ok_or(MachineError::Inapplicable)?,
            Move::Stay => c.head,
            Move::Right => c.head + 1,
        };
        let mut tape = c.tape.clone();
        if c.head >= tape.len() {
            tape.resize(c.head + 1, self.blank);
        }
        tape[c.head] = t.write;
        Ok(Configuration::new(t.to, head, tape, self.blank))
    }

    /// At most one transition per (state, symbol).
    pub fn is_deterministic(&self) -> bool {
        self.by_head.values().all(|v| v.len() <= 1)
    }

    /// Rename states via `f`; behavior is unchanged.
    pub fn rename_states(&self, f: impl Fn(&str) -> String) -> Result<WeightedTm, MachineError> {
        let mut b = self.to_builder();
        b.states = self.states.iter().map(|s| f(s)).collect();
        b.state_ids = b.states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        b.build()
    }

    /// Drop every transition that lies on no path of the state graph from
    /// the initial state to an accepting state, then drop unused states.
    /// Behavior is unchanged.
    pub fn trim(&self) -> WeightedTm {
        let m = self.states.len();
        let mut fwd = vec![Vec::new(); m];
        let mut bwd = vec![Vec::new(); m];
        for t in &self.transitions {
            fwd[t.from].push(t.to);
            bwd[t.to].push(t.from);
        }
        let sweep = |adj: &[Vec<usize>], roots: &mut dyn Iterator<Item = usize>| {
            let mut seen = vec![false; m];
            let mut stack: Vec<usize> = roots.collect();
            for &q in &stack {
                seen[q] = true;
            }
            while let Some(q) = stack.pop() {
                for &r in &adj[q] {
                    if !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
            seen
        };
        let reach = sweep(&fwd, &mut std::iter::once(self.initial));
        let coreach = sweep(&bwd, &mut self.accepting.iter().copied());
        let keep: Vec<&Transition> = self.transitions.iter().filter(|t| reach[t.from] && coreach[t.to]).collect();
        let mut used = vec![false; m];
        used[self.initial] = true;
        for &q in &self.accepting {
            used[q] = reach[q];
        }
        for t in &keep {
            used[t.from] = true;
            used[t.to] = true;
        }
        let mut b = MachineBuilder::new(self.semiring.clone(), &self.symbols[self.blank], &self.states[self.initial]);
        let sym: Vec<usize> = self.symbols.iter().map(|s| b.symbol(s)).collect();
        for &a in &self.input {
            b.input_symbol(&self.symbols[a]);
        }
        let ids: Vec<Option<usize>> = (0..m).map(|q| used[q].then(|| b.state(&self.states[q]))).collect();
        for &q in &self.accepting {
            if let Some(i) = ids[q] {
                b.accept(i);
            }
        }
        for t in keep {
            b.add(ids[t.from].unwrap(), sym[t.read], ids[t.to].unwrap(), sym[t.write], t.dir, t.weight.clone());
        }
        b.build().expect("trimming a valid machine keeps it valid")
    }

    pub fn describe_config(&self, c: &Configuration) -> String {
        let cells: Vec<&str> = c.tape.iter().map(|&s| self.symbols[s].as_str()).collect();
        format!("{}@{}[{}]", self.states[c.state], c.head, cells.join(" "))
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {}; {})", self.from, self.read, self.to, self.write, self.dir.as_int(), self.weight)
    }
}

#[cfg(test)]
mod tests;
