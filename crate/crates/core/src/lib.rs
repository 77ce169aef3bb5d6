//! Exact semiring-weighted logics on finite ordered structures, weighted
//! Turing machines, and constructive translations between the two.

pub mod eval;
pub mod fagin;
pub mod logic;
pub mod machine;
pub mod satred;
pub mod semiring;
pub mod structures;

pub use semiring::{Semiring, Value};
