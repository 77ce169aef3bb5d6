//! Machine files:
//!
//! ```json
//! {"semiring": "nat", "states": ["q0", "qf"], "input_alphabet": ["0", "1"],
//!  "work_alphabet": ["0", "1", "_"], "blank": "_", "initial": "q0",
//!  "accepting": ["qf"], "transitions": [["q0", "0", "qf", "0", 1, "2"]]}
//! ```
//!
//! Weights use the semiring's literal syntax, as strings or JSON numbers.

use serde::{Deserialize, Serialize};

use super::{MachineBuilder, MachineError, Move, Srtm, WeightedTm};
use crate::semiring::Semiring;

#[derive(Serialize, Deserialize)]
struct RawMachine {
    semiring: String,
    states: Vec<String>,
    input_alphabet: Vec<String>,
    work_alphabet: Vec<String>,
    blank: String,
    initial: String,
    accepting: Vec<String>,
    transitions: Vec<(String, String, String, String, i64, serde_json::Value)>,
}

fn weight_text(v: &serde_json::Value) -> Result<String, MachineError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(MachineError::Json(format!("weight must be a string or number, got {other}"))),
    }
}

type Raw6 = (String, String, String, String, Move, crate::semiring::Value);

fn frame(raw: &RawMachine, semiring: Option<Semiring>) -> Result<(MachineBuilder, Vec<Raw6>), MachineError> {
    let sr = match semiring {
        Some(s) => s,
        None => raw.semiring.parse().map_err(|e: crate::semiring::SemiringError| MachineError::Json(e.to_string()))?,
    };
    let mut b = MachineBuilder::new(sr.clone(), &raw.blank, &raw.initial);
    for s in &raw.states {
        b.state(s);
    }
    for a in &raw.work_alphabet {
        b.symbol(a);
    }
    for a in &raw.input_alphabet {
        if !raw.work_alphabet.contains(a) {
            return Err(MachineError::UnknownSymbol(format!("{a} (input symbol missing from work_alphabet)")));
        }
        b.input_symbol(a);
    }
    if !raw.work_alphabet.contains(&raw.blank) {
        return Err(MachineError::UnknownSymbol(format!("{} (blank missing from work_alphabet)", raw.blank)));
    }
    let known_state = |s: &String| raw.states.contains(s);
    if !known_state(&raw.initial) {
        return Err(MachineError::UnknownState(raw.initial.clone()));
    }
    for q in &raw.accepting {
        if !known_state(q) {
            return Err(MachineError::UnknownState(q.clone()));
        }
        let id = b.state(q);
        b.accept(id);
    }
    let mut out = Vec::new();
    for (p, a, q, c, d, w) in &raw.transitions {
        for s in [p, q] {
            if !known_state(s) {
                return Err(MachineError::UnknownState(s.clone()));
            }
        }
        for s in [a, c] {
            if !raw.work_alphabet.contains(s) {
                return Err(MachineError::UnknownSymbol(s.clone()));
            }
        }
        let lit = weight_text(w)?;
        let weight = sr.parse_literal(&lit).map_err(|e| MachineError::BadWeight { lit, msg: e.to_string() })?;
        out.push((p.clone(), a.clone(), q.clone(), c.clone(), Move::from_int(*d)?, weight));
    }
    Ok((b, out))
}

impl WeightedTm {
    /// Parse a machine file. `semiring` overrides the file's `"semiring"` field.
    pub fn from_json(text: &str, semiring: Option<Semiring>) -> Result<WeightedTm, MachineError> {
        let raw: RawMachine = serde_json::from_str(text).map_err(|e| MachineError::Json(e.to_string()))?;
        let (mut b, ts) = frame(&raw, semiring)?;
        for (p, a, q, c, d, w) in ts {
            b.add_named(&p, &a, &q, &c, d, w);
        }
        b.build()
    }

    pub fn to_json(&self) -> String {
        let sr = self.semiring();
        let raw = RawMachine {
            semiring: sr.to_string(),
            states: self.states.clone(),
            input_alphabet: self.input.iter().map(|&s| self.symbols[s].clone()).collect(),
            work_alphabet: self.symbols.clone(),
            blank: self.symbols[self.blank].clone(),
            initial: self.states[self.initial].clone(),
            accepting: self.accepting.iter().map(|&q| self.states[q].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| {
                    (
                        self.states[t.from].clone(),
                        self.symbols[t.read].clone(),
                        self.states[t.to].clone(),
                        self.symbols[t.write].clone(),
                        t.dir.as_int(),
                        serde_json::Value::String(sr.format(&t.weight)),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("machine serializes")
    }
}

impl Srtm {
    /// Same file format as [`WeightedTm::from_json`]; repeated moves are kept.
    pub fn from_json(text: &str, semiring: Option<Semiring>) -> Result<Srtm, MachineError> {
        let raw: RawMachine = serde_json::from_str(text).map_err(|e| MachineError::Json(e.to_string()))?;
        let (b, ts) = frame(&raw, semiring)?;
        let mut m = Srtm::new(b);
        for (p, a, q, c, d, w) in ts {
            m.add_named(&p, &a, &q, &c, d, w);
        }
        Ok(m)
    }
}
