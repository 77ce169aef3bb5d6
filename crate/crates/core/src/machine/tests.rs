use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;

fn sr(s: &str) -> Semiring {
    s.parse().unwrap()
}

fn lit(s: &Semiring, l: &str) -> Value {
    s.parse_literal(l).unwrap()
}

fn binary_builder(s: &Semiring) -> MachineBuilder {
    let mut b = MachineBuilder::new(s.clone(), "_", "q0");
    b.input_symbol("0");
    b.input_symbol("1");
    b
}

/// Reads the input left to right, accepts on the first blank.
fn scanner(s: &Semiring) -> WeightedTm {
    let mut b = binary_builder(s);
    let one = s.one();
    for a in ["0", "1"] {
        b.add_named("q0", a, "q0", a, Move::Right, one.clone());
    }
    b.add_named("q0", "_", "qf", "_", Move::Stay, one);
    let f = b.state("qf");
    b.accept(f);
    b.build().unwrap()
}

/// Three binary choices, then accept.
fn counter(s: &Semiring) -> WeightedTm {
    let mut b = binary_builder(s);
    let one = s.one();
    for (p, q) in [("q0", "q1"), ("q1", "q2"), ("q2", "qf")] {
        for a in ["0", "1", "_"] {
            for w in ["0", "1"] {
                b.add_named(p, a, q, w, Move::Right, one.clone());
            }
        }
    }
    let f = b.state("qf");
    b.accept(f);
    b.build().unwrap()
}

fn random_machine(s: &Semiring, seed: u64) -> WeightedTm {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut b = binary_builder(s);
    let states = ["q0", "q1", "q2", "qf"];
    let syms = ["0", "1", "_"];
    let f = b.state("qf");
    b.accept(f);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..rng.gen_range(2..10) {
        let p = states[rng.gen_range(0..3)];
        let q = states[rng.gen_range(0..4)];
        let a = syms[rng.gen_range(0..3)];
        let c = syms[rng.gen_range(0..3)];
        let d = Move::from_int(rng.gen_range(-1..=1)).unwrap();
        if seen.insert((p, a, q, c, d)) {
            b.add_named(p, a, q, c, d, s.sample(&mut rng));
        }
    }
    b.build().unwrap()
}

#[test]
fn steps() {
    let s = sr("nat");
    let mut b = binary_builder(&s);
    b.add_named("q0", "_", "q1", "1", Move::Stay, s.one());
    b.add_named("q1", "1", "q2", "1", Move::Right, s.one());
    b.add_named("q2", "_", "q3", "0", Move::Left, s.one());
    b.add_named("q3", "1", "q4", "1", Move::Left, s.one());
    let m = b.build().unwrap();
    let c0 = m.initial_config(&[]);
    let c1 = m.step(&c0, 0).unwrap();
    assert_eq!((c1.head, c1.tape()), (0, &[m.symbol_id("1").unwrap()][..]));
    let c2 = m.step(&c1, 1).unwrap();
    assert_eq!(c2.head, 1);
    assert_eq!(c2.read(m.blank()), m.blank());
    let c3 = m.step(&c2, 2).unwrap();
    assert_eq!(c3.head, 0);
    assert_eq!(m.step(&c3, 3), Err(MachineError::Inapplicable));
    assert_eq!(m.step(&c0, 1), Err(MachineError::Inapplicable));
}

#[test]
fn initial_accepting_gives_empty_computation() {
    let s = sr("nat");
    let mut b = binary_builder(&s);
    b.accept(0);
    let m = b.build().unwrap();
    let w = m.word("101").unwrap();
    let cs = computations(&m, &w, RunOptions::new(5)).unwrap();
    assert_eq!(cs.len(), 1);
    assert!(cs[0].is_empty());
    assert_eq!(cs[0].weight(&m), s.one());
    assert_eq!(behavior(&m, &w, RunOptions::new(5)).unwrap(), s.one());
    assert_eq!(time_meter(&m, &w, RunOptions::new(5)).unwrap(), 0);
}

#[test]
fn branching_behaviors() {
    let l = sr("langs");
    let mut b = binary_builder(&l);
    b.add_named("q0", "_", "qf", "_", Move::Stay, lit(&l, "{a}"));
    b.add_named("q0", "_", "qf", "0", Move::Stay, lit(&l, "{b}"));
    let f = b.state("qf");
    b.accept(f);
    let m = b.build().unwrap();
    assert_eq!(computations(&m, &[], RunOptions::new(3)).unwrap().len(), 2);
    assert_eq!(behavior(&m, &[], RunOptions::new(3)).unwrap(), lit(&l, "{a,b}"));
    assert!(!m.is_deterministic());
}

#[test]
fn single_weighted_transition() {
    let q = sr("rat");
    let mut b = binary_builder(&q);
    b.add_named("q0", "_", "qf", "_", Move::Stay, lit(&q, "3/4"));
    let f = b.state("qf");
    b.accept(f);
    let m = b.build().unwrap();
    assert_eq!(behavior(&m, &[], RunOptions::new(1)).unwrap(), lit(&q, "3/4"));
}

#[test]
fn counter_has_eight_paths() {
    let s = sr("nat");
    let m = counter(&s);
    assert_eq!(computations(&m, &[], RunOptions::new(3)).unwrap().len(), 8);
    assert_eq!(behavior(&m, &[], RunOptions::new(3)).unwrap(), lit(&s, "8"));
    assert_eq!(behavior(&m, &[], RunOptions::new(2)).unwrap(), s.zero());
    assert!(matches!(behavior(&m, &[], RunOptions::strict(2)), Err(MachineError::LiveBranches { .. })));
    assert!(matches!(computations(&m, &[], RunOptions::strict(2)), Err(MachineError::LiveBranches { .. })));
}

#[test]
fn scanner_time() {
    let s = sr("nat");
    let m = scanner(&s);
    for w in ["", "0", "0110"] {
        let w = m.word(w).unwrap();
        assert_eq!(time_meter(&m, &w, RunOptions::new(20)).unwrap(), w.len() + 1);
        assert!(m.is_deterministic());
    }
}

#[test]
fn padded_machine_keeps_running() {
    let s = sr("nat");
    let p = pad_machine(&scanner(&s));
    assert!(p.machine.accepting().is_empty());
    assert!(p.machine.is_deterministic());
    let w = p.machine.word("01").unwrap();
    assert_eq!(time_meter(&p.machine, &w, RunOptions::new(4)).unwrap(), 4);
    assert!(time_meter(&p.machine, &w, RunOptions::strict(4)).is_err());
    assert_eq!(p.exact_length_behavior(&w, 4).unwrap(), s.one());
    assert_eq!(p.exact_length_behavior(&w, 2).unwrap(), s.zero());
    assert_eq!(p.exact_length_count(&w, 9), 1);
}

#[test]
fn padding_preserves_bounded_behavior() {
    let s = sr("nat");
    for m in [scanner(&s), counter(&s), random_machine(&s, 7)] {
        let p = pad_machine(&m);
        for w in ["", "1", "01", "110"] {
            let w = m.word(w).unwrap();
            for t in 0..6 {
                assert_eq!(p.exact_length_behavior(&w, t).unwrap(), behavior(&m, &w, RunOptions::new(t)).unwrap());
            }
        }
    }
}

#[test]
fn srtm_merging() {
    let l = sr("langs");
    let mut frame = binary_builder(&l);
    let f = frame.state("qf");
    frame.accept(f);
    let mut m = Srtm::new(frame);
    m.add_named("q0", "_", "qf", "_", Move::Stay, lit(&l, "{a}"));
    m.add_named("q0", "_", "qf", "_", Move::Stay, lit(&l, "{b}"));
    let w = srtm_to_wtm(&m).unwrap();
    assert_eq!(w.transitions().len(), 1);
    assert_eq!(w.transitions()[0].weight, lit(&l, "{a,b}"));
    assert_eq!(behavior(&w, &[], RunOptions::new(2)).unwrap(), m.behavior(&[], RunOptions::new(2)).unwrap());
    assert!(w.is_deterministic());
}

#[test]
fn srtm_conflicting_writes_nondeterministic() {
    let s = sr("nat");
    let mut m = Srtm::new(binary_builder(&s));
    m.add_named("q0", "_", "q1", "0", Move::Stay, s.one());
    m.add_named("q0", "_", "q1", "1", Move::Stay, s.one());
    assert!(!srtm_to_wtm(&m).unwrap().is_deterministic());
}

#[test]
fn validation() {
    let s = sr("nat");
    let mut b = binary_builder(&s);
    let f = b.state("qf");
    b.accept(f);
    b.add_named("qf", "0", "q0", "0", Move::Stay, s.one());
    assert!(matches!(b.build(), Err(MachineError::LeavesAccepting(_))));
    let mut b = binary_builder(&s);
    b.add_named("q0", "0", "q0", "0", Move::Stay, s.one());
    b.add_named("q0", "0", "q0", "0", Move::Stay, s.one());
    assert!(matches!(b.build(), Err(MachineError::DuplicateTransition(_))));
    let mut b = binary_builder(&s);
    b.input_symbol("_");
    assert!(matches!(b.build(), Err(MachineError::BlankInInput(_))));
    let m = scanner(&s);
    assert!(m.word("012").is_err());
}

#[test]
fn json_round_trip() {
    let s = sr("int_mod:3");
    let m = random_machine(&s, 3);
    let back = WeightedTm::from_json(&m.to_json(), None).unwrap();
    assert_eq!(back.transitions(), m.transitions());
    assert_eq!(back.semiring(), m.semiring());
    let text = r#"{"semiring": "nat", "states": ["q0", "qf"], "input_alphabet": ["0", "1"],
        "work_alphabet": ["0", "1", "_"], "blank": "_", "initial": "q0", "accepting": ["qf"],
        "transitions": [["q0", "_", "qf", "_", 0, 2], ["q0", "_", "qf", "1", 0, "3"]]}"#;
    let m = WeightedTm::from_json(text, None).unwrap();
    let nat = sr("nat");
    assert_eq!(behavior(&m, &[], RunOptions::new(1)).unwrap(), lit(&nat, "5"));
}

#[test]
fn sequential_composition_multiplies() {
    // M1 chooses weight a or b, then hands over to M2 which chooses c or d.
    let l = sr("langs");
    let mut b = binary_builder(&l);
    b.add_named("q0", "_", "m", "_", Move::Stay, lit(&l, "{a}"));
    b.add_named("q0", "_", "m", "0", Move::Stay, lit(&l, "{b}"));
    for x in ["_", "0"] {
        b.add_named("m", x, "qf", x, Move::Right, lit(&l, "{c}"));
        b.add_named("m", x, "qf", "1", Move::Right, lit(&l, "{dd}"));
    }
    let f = b.state("qf");
    b.accept(f);
    let m = b.build().unwrap();
    let expect = l.mul(&lit(&l, "{a,b}"), &lit(&l, "{c,dd}"));
    assert_eq!(behavior(&m, &[], RunOptions::new(4)).unwrap(), expect);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_matches_enumeration(seed in any::<u64>(), w in "[01]{0,3}", name in prop::sample::select(vec!["nat", "int_mod:2", "bool"])) {
        let s = sr(name);
        let m = random_machine(&s, seed);
        let w = m.word(&w).unwrap();
        if let Ok(got) = nonzero_support(&m, &w, 8) {
            let mut want = fixedbitset::FixedBitSet::with_capacity(m.transitions().len());
            for c in computations(&m, &w, RunOptions::new(8)).unwrap() {
                if c.steps.iter().all(|&e| !s.is_zero(&m.transitions()[e].weight)) {
                    c.steps.iter().for_each(|&e| want.insert(e));
                }
            }
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn memoized_behavior_matches_layered(seed in any::<u64>(), w in "[01]{0,3}", name in prop::sample::select(vec!["nat", "langs", "trop", "int_mod:3"])) {
        let s = sr(name);
        let m = random_machine(&s, seed);
        let w = m.word(&w).unwrap();
        if let Ok(v) = total_behavior(&m, &w, 8) {
            prop_assert_eq!(v, behavior(&m, &w, RunOptions::strict(8)).unwrap());
        }
        let c = counter(&s);
        let w: Vec<usize> = Vec::new();
        prop_assert_eq!(total_behavior(&c, &w, 100).unwrap(), behavior(&c, &w, RunOptions::new(100)).unwrap());
    }

    #[test]
    fn layered_behavior_matches_path_sum(seed in any::<u64>(), w in "[01]{0,3}", name in prop::sample::select(vec!["nat", "langs", "trop", "int_mod:3"])) {
        let s = sr(name);
        let m = random_machine(&s, seed);
        let w = m.word(&w).unwrap();
        let opts = RunOptions::new(6);
        let paths = computations(&m, &w, opts).unwrap();
        let by_paths = s.sum(paths.iter().map(|c| c.weight(&m)).collect::<Vec<_>>().iter());
        prop_assert_eq!(behavior(&m, &w, opts).unwrap(), by_paths);
        let renamed = m.rename_states(|q| format!("r_{q}")).unwrap();
        prop_assert_eq!(behavior(&renamed, &w, opts).unwrap(), behavior(&m, &w, opts).unwrap());
    }

    #[test]
    fn deterministic_machines_accept_at_most_once(seed in any::<u64>(), w in "[01]{0,3}") {
        let s = sr("nat");
        let m = random_machine(&s, seed);
        if m.is_deterministic() {
            let w = m.word(&w).unwrap();
            prop_assert!(computations(&m, &w, RunOptions::new(8)).unwrap().len() <= 1);
        }
    }
}
