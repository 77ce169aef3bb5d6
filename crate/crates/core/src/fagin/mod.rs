//! Constructive translations between wESO sentences and weighted Turing
//! machines over ordered structures, and a harness comparing the two sides.

mod compile;
mod crosscheck;
mod decompile;

use thiserror::Error;

pub use compile::formula_to_wtm;
pub use crosscheck::{compare, crosscheck, machine_value, structures_up_to, Clock, Report, Row, Subject};
pub use decompile::{wtm_to_weso, wtm_to_weso_unordered, Decompiled};

use crate::eval::EvalError;
use crate::logic::{FragmentViolation, WellFormedError};
use crate::machine::MachineError;
use crate::structures::StructureError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FaginError {
    #[error(transparent)]
    Fragment(#[from] FragmentViolation),
    #[error(transparent)]
    IllFormed(#[from] WellFormedError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("literal `{lit}`: {msg}")]
    BadLiteral { lit: String, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("k = {k} is too small: the signature has a relation of arity {arity}")]
    KTooSmall { k: usize, arity: usize },
    #[error("semiring {semiring} is not {missing}")]
    SemiringFlags { semiring: String, missing: String },
}
