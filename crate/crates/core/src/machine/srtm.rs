use rustc_hash::FxHashMap;

use super::{Configuration, MachineBuilder, MachineError, Move, RunOptions, Transition, WeightedTm};
use crate::semiring::Value;

/// A machine whose transitions form a finite multiset of six-tuples; the
/// weight is part of the tuple, so the same move may occur several times.
#[derive(Clone, Debug)]
pub struct Srtm {
    /// Alphabets, states and acceptance; its own transition list is ignored.
    pub frame: MachineBuilder,
    pub transitions: Vec<Transition>,
}

impl Srtm {
    pub fn new(frame: MachineBuilder) -> Self {
        Srtm { frame, transitions: Vec::new() }
    }

    pub fn add_named(&mut self, from: &str, read: &str, to: &str, write: &str, dir: Move, weight: Value) {
        let (p, a, q, b) = (self.frame.state(from), self.frame.symbol(read), self.frame.state(to), self.frame.symbol(write));
        self.transitions.push(Transition { from: p, read: a, to: q, write: b, dir, weight });
    }

    /// Behavior with every tuple of the multiset taken as a separate move.
    pub fn behavior(&self, w: &[usize], opts: RunOptions) -> Result<Value, MachineError> {
        let mut probe = self.frame.clone();
        probe.transitions.clear();
        let shell = probe.build()?;
        let sr = shell.semiring().clone();
        let blank = shell.blank();
        let mut total = sr.zero();
        let mut layer: FxHashMap<Configuration, Value> = FxHashMap::default();
        layer.insert(shell.initial_config(w), sr.one());
        for t in 0..=opts.max_steps {
            let mut next: FxHashMap<Configuration, Value> = FxHashMap::default();
            for (c, wc) in &layer {
                if shell.is_accepting(c.state) {
                    total = sr.add(&total, wc);
                    continue;
                }
                if t == opts.max_steps {
                    continue;
                }
                for tr in &self.transitions {
                    if tr.from != c.state || tr.read != c.read(blank) {
                        continue;
                    }
                    let head = match tr.dir {
                        Move::Left => match c.head.checked_sub(1) {
                            Some(h) => h,
                            None => continue,
                        },
                        Move::Stay => c.head,
                        Move::Right => c.head + 1,
                    };
                    let mut tape = c.tape().to_vec();
                    if c.head >= tape.len() {
                        tape.resize(c.head + 1, blank);
                    }
                    tape[c.head] = tr.write;
                    let d = Configuration::new(tr.to, head, tape, blank);
                    let v = sr.mul(wc, &tr.weight);
                    let slot = next.entry(d).or_insert_with(|| sr.zero());
                    *slot = sr.add(slot, &v);
                }
            }
            layer = next;
        }
        Ok(total)
    }
}

/// Merge duplicate moves: `ν(p,a,q,b,d)` is the sum of the weights of all
/// tuples `(p,a,q,b,d,s)`.
pub fn srtm_to_wtm(m: &Srtm) -> Result<WeightedTm, MachineError> {
    let mut b = m.frame.clone();
    b.transitions.clear();
    let sr = b.semiring().clone();
    let mut order = Vec::new();
    let mut merged: FxHashMap<_, Value> = FxHashMap::default();
    for t in &m.transitions {
        let key = t.key();
        match merged.get_mut(&key) {
            Some(w) => *w = sr.add(w, &t.weight),
            None => {
                order.push(key);
                merged.insert(key, t.weight.clone());
            }
        }
    }
    for key @ (p, a, q, c, d) in order {
        b.add(p, a, q, c, d, merged.remove(&key).expect("merged key"));
    }
    b.build()
}
