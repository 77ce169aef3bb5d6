//! Weighted propositional logic, the series `SAT[S]`, and the grounding
//! reduction from wESO sentences to propositional formulas.

mod ground;
mod prop;

use thiserror::Error;

pub use ground::{cook_levin_reduce, prop_var};
pub use prop::{eval_prop, parse_prop, sat_series, Prop, TruthAssignment, DEFAULT_VAR_CAP};

use crate::semiring::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("variable `{0}` has no truth value")]
    MissingVariable(String),
    #[error("{vars} variables exceed the enumeration limit of {cap}")]
    CapExceeded { vars: usize, cap: usize },
    #[error("at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("{0}")]
    BadLiteral(String),
    #[error("not of the shape sum X1 ... sum Xn. psi: {0}")]
    Shape(String),
}

/// One input of a many-one check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManyOneRow<I> {
    pub input: I,
    pub source: Value,
    pub target: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManyOneReport<I> {
    pub rows: Vec<ManyOneRow<I>>,
}

impl<I> ManyOneReport<I> {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(|r| r.source == r.target)
    }

    pub fn first_counterexample(&self) -> Option<&ManyOneRow<I>> {
        self.rows.iter().find(|r| r.source != r.target)
    }
}

/// Check `⟨σ₂, f(w)⟩ = ⟨σ₁, w⟩` on each input: `source` evaluates `σ₁`,
/// `target` evaluates `σ₂` on the transformed input.
pub fn check_many_one<I: Clone, J, E>(
    source: impl Fn(&I) -> Result<Value, E>,
    target: impl Fn(&J) -> Result<Value, E>,
    f: impl Fn(&I) -> Result<J, E>,
    inputs: &[I],
) -> Result<ManyOneReport<I>, E> {
    let mut rows = Vec::with_capacity(inputs.len());
    for w in inputs {
        let s = source(w)?;
        let t = target(&f(w)?)?;
        rows.push(ManyOneRow { input: w.clone(), source: s, target: t });
    }
    Ok(ManyOneReport { rows })
}

#[cfg(test)]
mod tests;
