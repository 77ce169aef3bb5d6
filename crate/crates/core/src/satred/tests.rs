use proptest::prelude::*;

use super::*;
use crate::eval::{eval_weighted, EvalContext};
use crate::logic::parse_formula;
use crate::semiring::Semiring;
use crate::structures::{Signature, Structure};

fn sr(name: &str) -> Semiring {
    name.parse().unwrap()
}

fn var(x: &str) -> Prop {
    Prop::Var(x.into())
}

fn neg(x: &str) -> Prop {
    Prop::NegVar(x.into())
}

fn or(a: Prop, b: Prop) -> Prop {
    Prop::Or(Box::new(a), Box::new(b))
}

fn and(a: Prop, b: Prop) -> Prop {
    Prop::And(Box::new(a), Box::new(b))
}

fn c(s: &Semiring, l: &str) -> Prop {
    Prop::Const(s.parse_literal(l).unwrap())
}

/// Independent enumerator: every assignment, evaluated from scratch.
fn naive_sat(phi: &Prop, s: &Semiring) -> crate::semiring::Value {
    let vars = phi.vars();
    let mut acc = s.zero();
    for code in 0u64..1 << vars.len() {
        let v: TruthAssignment = vars.iter().enumerate().map(|(i, x)| (x.clone(), code >> i & 1 == 1)).collect();
        acc = s.add(&acc, &eval_prop(phi, &v, s).unwrap());
    }
    acc
}

#[test]
fn evaluation() {
    let nat = sr("nat");
    let tautology = or(var("x"), neg("x"));
    for b in [false, true] {
        let v: TruthAssignment = [("x".to_string(), b)].into();
        assert_eq!(eval_prop(&tautology, &v, &nat).unwrap(), nat.one());
    }
    assert_eq!(eval_prop(&c(&nat, "7"), &TruthAssignment::new(), &nat).unwrap(), nat.parse_literal("7").unwrap());
    let phi = or(and(var("x"), c(&nat, "2")), c(&nat, "3"));
    let v: TruthAssignment = [("x".to_string(), true)].into();
    assert_eq!(eval_prop(&phi, &v, &nat).unwrap(), nat.parse_literal("5").unwrap());
    assert_eq!(eval_prop(&var("y"), &v, &nat), Err(SatError::MissingVariable("y".into())));
}

#[test]
fn series() {
    let nat = sr("nat");
    assert_eq!(sat_series(&or(var("x"), neg("x")), &nat, 10).unwrap(), nat.parse_literal("2").unwrap());
    assert_eq!(sat_series(&c(&nat, "4"), &nat, 10).unwrap(), nat.parse_literal("4").unwrap());
    let z2 = sr("int_mod:2");
    assert_eq!(sat_series(&var("x"), &z2, 10).unwrap(), z2.one());
    let many = (0..5).map(|i| var(&format!("x{i}"))).reduce(and).unwrap();
    assert!(matches!(sat_series(&many, &nat, 4), Err(SatError::CapExceeded { vars: 5, cap: 4 })));
}

#[test]
fn noncommutative_order_is_kept() {
    let langs = sr("langs");
    let phi = and(or(var("x"), c(&langs, "{a}")), c(&langs, "{b}"));
    // x=0: a·b ; x=1: (ε+a)·b
    assert_eq!(sat_series(&phi, &langs, 4).unwrap(), langs.parse_literal("{ab, b}").unwrap());
}

#[test]
fn text_round_trip() {
    let nat = sr("nat");
    let phi = or(and(var("P[0,1]"), neg("Q[]")), and(c(&nat, "12"), var("x")));
    let text = phi.display(&nat).to_string();
    assert_eq!(parse_prop(&text, &nat).unwrap(), phi);
    assert_eq!(parse_prop("x & y | !z", &nat).unwrap(), or(and(var("x"), var("y")), neg("z")));
    assert!(parse_prop("x &", &nat).is_err());
    let langs = sr("langs");
    let phi = and(c(&langs, "{a, b}"), var("x"));
    assert_eq!(parse_prop(&phi.display(&langs).to_string(), &langs).unwrap(), phi);
}

fn check_reduction(src: &str, sig: &str, semiring: &str, nmax: usize) {
    let s = sr(semiring);
    let sig = Signature::parse(sig).unwrap();
    let phi = parse_formula(src).unwrap();
    for n in 1..=nmax {
        for a in Structure::enumerate(&sig, n).unwrap() {
            let psi = cook_levin_reduce(&phi, &a, &s).unwrap();
            let want = eval_weighted(&phi, &EvalContext::new(&a, &s)).unwrap();
            assert_eq!(sat_series(&psi, &s, DEFAULT_VAR_CAP).unwrap(), want, "{src} on {}", a.to_json());
        }
    }
}

#[test]
fn independent_choices() {
    let nat = sr("nat");
    let phi = parse_formula("sumSO P:1. prod x. (P(x) ? c(2))").unwrap();
    let a = Structure::enumerate(&Signature::empty(), 2).unwrap().remove(0);
    let psi = cook_levin_reduce(&phi, &a, &nat).unwrap();
    assert_eq!(sat_series(&psi, &nat, 10).unwrap(), nat.parse_literal("9").unwrap());
}

#[test]
fn reductions_preserve_values() {
    for (s, a, b) in [("nat", "2", "3"), ("nat_max", "2", "5"), ("langs", "{a}", "{b, c}"), ("int_mod:3", "2", "2")] {
        let cases = [
            "sumSO P:1. prod x. (P(x) ? c(A))",
            "sumSO X:1. sum x. (X(x) & exists y. e(x, y))",
            "sumSO X:1. (forall x. (X(x) | !X(x)))",
            "sumSO X:2. forall x. forall y. (X(x, y) <-> e(x, y))",
            "sumSO X:1. sumSO Y:1. prod x. ((X(x) -> Y(x)) (*) c(A) (+) c(B))",
            "exists x. forall y. (x = y | x < y)",
            "sum x. prod y. (e(x, y) ? c(B))",
            "sumSO X:1. prod x. sum y. ((X(y) | e(x, y)) (*) c(A) (+) (x < y) (*) c(B))",
        ];
        for src in cases {
            check_reduction(&src.replace('A', a).replace('B', b), "e:2", s, 2);
        }
    }
}

#[test]
fn grounded_atoms_are_constants() {
    let nat = sr("nat");
    let sig = Signature::parse("p:1").unwrap();
    let mut a = Structure::new(1, sig).unwrap();
    a.set_relation("p", crate::structures::Relation::full(1, 1)).unwrap();
    let psi = cook_levin_reduce(&parse_formula("forall x. p(x)").unwrap(), &a, &nat).unwrap();
    assert_eq!(psi, Prop::Const(nat.one()));
}

#[test]
fn shape_errors() {
    let nat = sr("nat");
    let a = Structure::enumerate(&Signature::empty(), 2).unwrap().remove(0);
    for src in ["exists x. existsSO X:1. X(x)", "sum x. sumSO X:1. X(x)"] {
        let phi = parse_formula(src).unwrap();
        assert!(matches!(cook_levin_reduce(&phi, &a, &nat), Err(SatError::Shape(_))), "{src}");
    }
}

#[test]
fn many_one_harness() {
    let nat = sr("nat");
    let sig = Signature::parse("e:2").unwrap();
    let phi = parse_formula("sumSO X:1. sum x. (X(x) & exists y. e(x, y))").unwrap();
    let inputs = Structure::enumerate(&sig, 2).unwrap().into_iter().take(5).collect::<Vec<_>>();
    let source = |a: &Structure| eval_weighted(&phi, &EvalContext::new(a, &nat)).map_err(|e| e.to_string());
    let target = |p: &Prop| sat_series(p, &nat, DEFAULT_VAR_CAP).map_err(|e| e.to_string());
    let reduce = |a: &Structure| cook_levin_reduce(&phi, a, &nat).map_err(|e| e.to_string());
    assert!(check_many_one(source, target, reduce, &inputs).unwrap().agrees());
    let identity = check_many_one(source, source, |a: &Structure| Ok(a.clone()), &inputs).unwrap();
    assert!(identity.agrees());
    let broken = |a: &Structure| reduce(a).map(|p| Prop::Or(Box::new(p), Box::new(Prop::Const(nat.one()))));
    let report = check_many_one(source, target, broken, &inputs).unwrap();
    assert!(report.first_counterexample().is_some());
}

fn arb_prop(nvars: usize) -> impl Strategy<Value = Prop> {
    let leaf = prop_oneof![
        (0..nvars).prop_map(|i| Prop::Var(format!("x{i}"))),
        (0..nvars).prop_map(|i| Prop::NegVar(format!("x{i}"))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Prop::Or(Box::new(a), Box::new(b))),
        ]
    })
}

fn classical(p: &Prop, v: &TruthAssignment) -> bool {
    match p {
        Prop::Var(x) => v[x],
        Prop::NegVar(x) => !v[x],
        Prop::Const(_) => unreachable!("constant-free"),
        Prop::And(a, b) => classical(a, v) && classical(b, v),
        Prop::Or(a, b) => classical(a, v) || classical(b, v),
    }
}

proptest! {
    #[test]
    fn boolean_series_is_satisfiability(p in arb_prop(4)) {
        let b = sr("bool");
        let vars = p.vars();
        let sat = (0u64..1 << vars.len()).any(|code| {
            let v: TruthAssignment = vars.iter().enumerate().map(|(i, x)| (x.clone(), code >> i & 1 == 1)).collect();
            classical(&p, &v)
        });
        prop_assert_eq!(sat_series(&p, &b, 10).unwrap(), b.from_bool(sat));
    }

    #[test]
    fn natural_series_matches_enumeration(p in arb_prop(4), s in proptest::sample::select(vec!["nat", "int_mod:5", "trop"])) {
        let s = sr(s);
        prop_assert_eq!(sat_series(&p, &s, 10).unwrap(), naive_sat(&p, &s));
    }
}
