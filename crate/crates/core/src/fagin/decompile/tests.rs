use super::*;
use crate::eval::{eval_weighted, EvalContext};
use crate::fagin::{crosscheck, structures_up_to, Subject};
use crate::logic::check_fragment;
use crate::logic::Fragment;
use crate::machine::{MachineBuilder, Move};
use crate::semiring::{Semiring, Value};
use crate::structures::{encode, Structure};

type Rule<'a> = (&'a str, &'a str, &'a str, &'a str, i64, &'a str);

fn machine(sr: &Semiring, rules: &[Rule<'_>], accepting: &[&str]) -> WeightedTm {
    let mut b = MachineBuilder::new(sr.clone(), "_", "q0");
    b.input_symbol("0");
    b.input_symbol("1");
    for &(p, a, q, w, d, wt) in rules {
        let wt = sr.parse_literal(wt).unwrap();
        b.add_named(p, a, q, w, Move::from_int(d).unwrap(), wt);
    }
    for f in accepting {
        let q = b.state(f);
        b.accept(q);
    }
    b.build().unwrap()
}

fn first_bit(sr: &Semiring) -> WeightedTm {
    let two = if sr.name() == "bool" { "1" } else { "2" };
    machine(sr, &[("q0", "1", "qa", "1", 1, two), ("q0", "0", "qa", "0", 0, "1")], &["qa"])
}

fn branching(sr: &Semiring) -> WeightedTm {
    let w = |s: &'static str| if sr.name() == "bool" { "1" } else { s };
    machine(
        sr,
        &[
            ("q0", "1", "qa", "1", 1, w("3")),
            ("q0", "1", "qa", "0", 0, w("2")),
            ("q0", "0", "qb", "1", 1, "1"),
            ("qb", "_", "qa", "_", 0, "1"),
        ],
        &["qa"],
    )
}

fn sr(name: &str) -> Semiring {
    name.parse().unwrap()
}

fn unary() -> Signature {
    Signature::parse("p:1").unwrap()
}

/// Values of `φ` and the padded run counts agree, one structure at a time.
fn count_check(m: &WeightedTm, sig: &Signature, nmax: usize) {
    let dec = wtm_to_weso(m, sig, 1).unwrap();
    let nat = sr("nat");
    let count = dec.count_sentence();
    let padded = pad_machine(m);
    for a in structures_up_to(sig, nmax).unwrap() {
        let w = m.word(&encode(&a, &[]).unwrap()).unwrap();
        let runs = padded.exact_length_count(&w, a.size() - 1);
        let got = eval_weighted(&count, &EvalContext::new(&a, &nat)).unwrap();
        assert_eq!(got, nat.parse_literal(&runs.to_string()).unwrap(), "{}", a.to_json());
    }
}

#[test]
fn sentence_is_weso() {
    let m = first_bit(&sr("nat"));
    let dec = wtm_to_weso(&m, &unary(), 1).unwrap();
    let phi = dec.sentence();
    check_fragment(&phi, Fragment::WEso).unwrap();
    assert!(phi.is_sentence());
    assert_eq!(dec.so_prefix.len(), m.symbols().len() + m.states().len());
}

#[test]
fn satisfying_assignments_are_runs() {
    count_check(&first_bit(&sr("nat")), &unary(), 2);
    count_check(&branching(&sr("nat")), &unary(), 2);
}

#[test]
fn values_match_machine() {
    for name in ["nat", "bool"] {
        let s = sr(name);
        for m in [first_bit(&s), branching(&s)] {
            let report = crosscheck(Subject::Machine { machine: &m, k: 1 }, &unary(), &s, 2).unwrap();
            assert!(report.agrees(), "{name}: {:?}", report.first_counterexample());
        }
    }
}

#[test]
fn weights_multiply_in_time_order() {
    let nat = sr("nat");
    let m = first_bit(&nat);
    let phi = wtm_to_weso(&m, &unary(), 1).unwrap().sentence();
    let a = Structure::enumerate(&unary(), 2).unwrap().into_iter().find(|a| encode(a, &[]).unwrap() == "10").unwrap();
    assert_eq!(eval_weighted(&phi, &EvalContext::new(&a, &nat)).unwrap(), nat.parse_literal("2").unwrap());
}

#[test]
fn no_accepting_state_gives_zero() {
    let nat = sr("nat");
    let m = machine(&nat, &[("q0", "1", "q1", "1", 1, "2")], &[]);
    let phi = wtm_to_weso(&m, &unary(), 1).unwrap().sentence();
    for a in structures_up_to(&unary(), 2).unwrap() {
        assert!(nat.is_zero(&eval_weighted(&phi, &EvalContext::new(&a, &nat)).unwrap()));
    }
}

#[test]
fn empty_signature() {
    let nat = sr("nat");
    let m = machine(&nat, &[("q0", "0", "qa", "0", 1, "7")], &["qa"]);
    let sig = Signature::empty();
    count_check(&m, &sig, 2);
    let report = crosscheck(Subject::Machine { machine: &m, k: 1 }, &sig, &nat, 3).unwrap();
    assert_eq!(report.sizes(), vec![1, 2, 3]);
    // one step fits from n = 2 on
    assert!(report.rows.iter().all(|r| r.agrees()));
    assert_eq!(report.rows.iter().map(|r| r.within_clock).collect::<Vec<_>>(), vec![false, true, true]);
}

#[test]
fn rejections() {
    let nat = sr("nat");
    let m = first_bit(&nat);
    let sig = Signature::parse("e:2").unwrap();
    assert!(matches!(wtm_to_weso(&m, &sig, 1), Err(FaginError::KTooSmall { k: 1, arity: 2 })));
    let two = Signature::parse("p:1, q:1").unwrap();
    assert!(matches!(wtm_to_weso(&m, &two, 1), Err(FaginError::Unsupported(_))));
    assert!(matches!(wtm_to_weso_unordered(&m, &unary(), 1), Err(FaginError::SemiringFlags { .. })));
}

#[test]
fn unordered_matches_ordered() {
    for name in ["bool", "nat_max"] {
        let s = sr(name);
        // order-invariant: accepts iff the first cell read is not blank
        let w = if name == "bool" { "1" } else { "4" };
        let m = machine(&s, &[("q0", "1", "qa", "1", 0, w), ("q0", "0", "qa", "0", 0, w)], &["qa"]);
        let ordered = wtm_to_weso(&m, &unary(), 1).unwrap().sentence();
        let unordered = wtm_to_weso_unordered(&m, &unary(), 1).unwrap().sentence();
        for a in structures_up_to(&unary(), 2).unwrap() {
            let ctx = EvalContext::new(&a, &s);
            let x: Value = eval_weighted(&ordered, &ctx).unwrap();
            assert_eq!(x, eval_weighted(&unordered, &ctx).unwrap(), "{name} {}", a.to_json());
        }
    }
}

fn eraser(sr: &Semiring) -> WeightedTm {
    let w = |s: &'static str| if sr.name() == "bool" { "1" } else { s };
    machine(
        sr,
        &[
            ("q0", "1", "qa", "_", 1, w("2")),
            ("q0", "0", "q1", "1", 1, w("3")),
            ("q1", "0", "qa", "0", 0, w("5")),
            ("q1", "1", "qa", "1", 0, "1"),
        ],
        &["qa"],
    )
}

#[test]
fn negated_clauses_are_noticed() {
    let nat = sr("nat");
    let structures = structures_up_to(&unary(), 2).unwrap();
    for m in [first_bit(&nat), branching(&nat), eraser(&nat)] {
        let dec = wtm_to_weso(&m, &unary(), 1).unwrap();
        assert_eq!(dec.psi.len(), 5);
        for (i, (label, c)) in dec.psi.iter().enumerate() {
            let bad = dec.with_clause(i, Formula::not(c.clone())).sentence();
            let differs = structures.iter().any(|a| {
                let ctx = EvalContext::new(a, &nat);
                eval_weighted(&bad, &ctx).unwrap() != eval_weighted(&dec.sentence(), &ctx).unwrap()
            });
            assert!(differs, "clause {label}");
        }
    }
}
