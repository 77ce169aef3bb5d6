//! Compare a sentence and a machine on every small ordered structure.

use rayon::prelude::*;

use super::{formula_to_wtm, wtm_to_weso, FaginError};
use crate::eval::{eval_weighted, Caps, EvalContext};
use crate::logic::Formula;
use crate::machine::{behavior, total_behavior, RunOptions, WeightedTm};
use crate::semiring::{Semiring, Value};
use crate::structures::{encode, Signature, Structure};

/// How the machine side is run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clock {
    /// Every computation halts within this many steps; exceeding it is an error.
    Halting(usize),
    /// Computations of at most `n^k - 1` steps on a structure of size `n`.
    Polynomial(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub structure: Structure,
    pub formula: Value,
    pub machine: Value,
    /// False when some computation runs past the clock, so `machine` is
    /// the behavior restricted to the clock rather than all of `‖M‖`.
    pub within_clock: bool,
}

impl Row {
    pub fn agrees(&self) -> bool {
        self.formula == self.machine
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(Row::agrees)
    }

    pub fn first_counterexample(&self) -> Option<&Row> {
        self.rows.iter().find(|r| !r.agrees())
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.rows.iter().map(|r| r.structure.size()).collect();
        out.dedup();
        out
    }
}

/// What to check: a sentence against its compiled machine, or a machine
/// against its translation with time `n^k`.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Formula(&'a Formula),
    Machine { machine: &'a WeightedTm, k: usize },
}

/// Every structure over `sig` with `1..=size_cap` elements, by size.
pub fn structures_up_to(sig: &Signature, size_cap: usize) -> Result<Vec<Structure>, FaginError> {
    let mut out = Vec::new();
    for n in 1..=size_cap {
        out.extend(Structure::enumerate(sig, n)?);
    }
    Ok(out)
}

/// Translate `subject` to the other side and compare the two on every
/// structure with at most `size_cap` elements.
pub fn crosscheck(subject: Subject<'_>, sig: &Signature, sr: &Semiring, size_cap: usize) -> Result<Report, FaginError> {
    let structures = structures_up_to(sig, size_cap)?;
    match subject {
        Subject::Formula(phi) => {
            let m = formula_to_wtm(phi, sig, sr)?;
            compare(phi, &m, sr, Clock::Halting(usize::MAX), &structures, Caps::default())
        }
        Subject::Machine { machine, k } => {
            if machine.semiring() != sr {
                return Err(FaginError::Unsupported(format!(
                    "machine is over {}, not {}",
                    machine.semiring().name(),
                    sr.name()
                )));
            }
            let phi = wtm_to_weso(machine, sig, k)?.sentence();
            compare(&phi, machine, sr, Clock::Polynomial(k), &structures, Caps::default())
        }
    }
}

/// Value of `m` on `enc(a)` under `clock`, and whether the clock covers every computation.
pub fn machine_value(m: &WeightedTm, a: &Structure, clock: Clock) -> Result<(Value, bool), FaginError> {
    let w = m.word(&encode(a, &[])?)?;
    let limit = match clock {
        Clock::Halting(s) => return Ok((total_behavior(m, &w, s)?, true)),
        Clock::Polynomial(k) => a.size().pow(k as u32) - 1,
    };
    match total_behavior(m, &w, limit) {
        Ok(v) => Ok((v, true)),
        Err(_) => Ok((behavior(m, &w, RunOptions::new(limit))?, false)),
    }
}

/// Row-by-row comparison of `phi` and `m` on the given structures.
pub fn compare(
    phi: &Formula,
    m: &WeightedTm,
    sr: &Semiring,
    clock: Clock,
    structures: &[Structure],
    caps: Caps,
) -> Result<Report, FaginError> {
    let rows = structures
        .par_iter()
        .map(|a| {
            let formula = eval_weighted(phi, &EvalContext::new(a, sr).with_caps(caps))?;
            let (machine, within_clock) = machine_value(m, a, clock)?;
            Ok(Row { structure: a.clone(), formula, machine, within_clock })
        })
        .collect::<Result<Vec<_>, FaginError>>()?;
    Ok(Report { rows })
}
