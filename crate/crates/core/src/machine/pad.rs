use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use super::{Configuration, MachineError, Move, WeightedTm};
use crate::semiring::Value;

/// A machine whose former accepting states idle forever.
///
/// `machine` has no accepting states; each goal state carries a weight-𝟙
/// stay-in-place loop on every symbol. A computation of `M` of length
/// `t <= T` ending in `F` corresponds to exactly one run of length `T` of
/// the padded machine ending in a goal state.
#[derive(Clone, Debug)]
pub struct PaddedTm {
    pub machine: WeightedTm,
    pub goal: BTreeSet<usize>,
}

pub fn pad_machine(m: &WeightedTm) -> PaddedTm {
    let mut b = m.to_builder();
    let goal = std::mem::take(&mut b.accepting);
    let one = m.semiring().one();
    for &q in &goal {
        for a in 0..m.symbols().len() {
            b.add(q, a, q, a, Move::Stay, one.clone());
        }
    }
    let machine = b.build().expect("padding a valid machine keeps it valid");
    PaddedTm { machine, goal }
}

impl PaddedTm {
    /// Sum of the weights of runs of exactly `steps` steps that end in a goal state.
    pub fn exact_length_behavior(&self, w: &[usize], steps: usize) -> Result<Value, MachineError> {
        let m = &self.machine;
        let sr = m.semiring();
        let mut layer: FxHashMap<Configuration, Value> = FxHashMap::default();
        layer.insert(m.initial_config(w), sr.one());
        for _ in 0..steps {
            let mut next: FxHashMap<Configuration, Value> = FxHashMap::default();
            for (c, wc) in &layer {
                for &e in m.applicable(c.state, c.read(m.blank())) {
                    let Ok(d) = m.step(c, e) else { continue };
                    let v = sr.mul(wc, &m.transitions()[e].weight);
                    match next.get_mut(&d) {
                        Some(acc) => *acc = sr.add(acc, &v),
                        None => {
                            next.insert(d, v);
                        }
                    }
                }
            }
            layer = next;
        }
        Ok(sr.sum(layer.iter().filter(|(c, _)| self.goal.contains(&c.state)).map(|(_, v)| v)))
    }

    /// Number of runs of exactly `steps` steps ending in a goal state.
    pub fn exact_length_count(&self, w: &[usize], steps: usize) -> u64 {
        let m = &self.machine;
        let mut layer: FxHashMap<Configuration, u64> = FxHashMap::default();
        layer.insert(m.initial_config(w), 1);
        for _ in 0..steps {
            let mut next: FxHashMap<Configuration, u64> = FxHashMap::default();
            for (c, k) in &layer {
                for &e in m.applicable(c.state, c.read(m.blank())) {
                    if let Ok(d) = m.step(c, e) {
                        *next.entry(d).or_default() += k;
                    }
                }
            }
            layer = next;
        }
        layer.iter().filter(|(c, _)| self.goal.contains(&c.state)).map(|(_, k)| k).sum()
    }
}
