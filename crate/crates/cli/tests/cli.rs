use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const K3: &str = r#"{"universe":3,"signature":{"edge":2},"relations":{"edge":[[0,1],[1,0],[0,2],[2,0],[1,2],[2,1]]}}"#;

const LARGEST_CLIQUE: &str = "def clique(X:1) := forall x. forall y. ((X(x) & X(y) & x != y) -> edge(x, y));\n\
    sum X:1. (clique(X) (*) prod x. (c(0) (+) (c(1) (*) X(x))))";

fn machine_json(semiring: &str, accepting: &[&str], rules: &[(&str, &str, &str, &str, i64, &str)]) -> String {
    let ts: Vec<String> = rules
        .iter()
        .map(|(p, a, q, b, d, w)| format!(r#"["{p}","{a}","{q}","{b}",{d},"{w}"]"#))
        .collect();
    let acc: Vec<String> = accepting.iter().map(|q| format!("\"{q}\"")).collect();
    format!(
        r#"{{"semiring":"{semiring}","states":["q0","q1","qa"],"input_alphabet":["0","1"],"work_alphabet":["_","0","1"],"blank":"_","initial":"q0","accepting":[{}],"transitions":[{}]}}"#,
        acc.join(","),
        ts.join(",")
    )
}

#[test]
fn eval_largest_clique() {
    let d = TempDir::new().unwrap();
    let a = put(d.path(), "k3.json", K3);
    let f = put(d.path(), "f.wf", LARGEST_CLIQUE);
    let o = wdc(&["eval", "--semiring", "arctic", "--structure", s(&a), "--formula", s(&f)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "3");
    let o = wdc(&["eval", "--semiring", "arctic", "--structure", s(&a), "--formula", s(&f), "--stats"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("so_assignments ")));
}

#[test]
fn eval_constant_and_errors() {
    let d = TempDir::new().unwrap();
    let a = put(d.path(), "k3.json", K3);
    let f = put(d.path(), "f.wf", "c(1/2)");
    let o = wdc(&["eval", "--semiring", "rat", "--structure", s(&a), "--formula", s(&f)]);
    assert_eq!(stdout(&o), "1/2");
    let o = wdc(&["eval", "--semiring", "no_such", "--structure", s(&a), "--formula", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    let bad = put(d.path(), "bad.wf", "forall x. (");
    let o = wdc(&["eval", "--semiring", "nat", "--structure", s(&a), "--formula", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let missing = d.path().join("missing.wf");
    let o = wdc(&["eval", "--semiring", "nat", "--structure", s(&a), "--formula", s(&missing)]);
    assert_eq!(o.status.code(), Some(1));
    let so = put(d.path(), "so.wf", "sum X:2. c(1)");
    let o = wdc(&["eval", "--semiring", "nat", "--structure", s(&a), "--formula", s(&so), "--max-subsets", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn eval_with_assignment() {
    let d = TempDir::new().unwrap();
    let a = put(d.path(), "k3.json", K3);
    let f = put(d.path(), "f.wf", "sum y. (X(y) & edge(x, y))");
    let o = wdc(&["eval", "--semiring", "nat", "--structure", s(&a), "--formula", s(&f), "--assign", "x=0,X={0,1,2}"]);
    assert_eq!(stdout(&o), "2");
}

#[test]
fn run_two_branches() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "m.json", &machine_json("nat", &["qa"], &[("q0", "1", "qa", "1", 1, "2"), ("q0", "1", "qa", "0", 0, "3")]));
    let o = wdc(&["run", "--machine", s(&m), "--input", "1"]);
    assert_eq!(stdout(&o), "5");
    let o = wdc(&["run", "--machine", s(&m), "--input", "0"]);
    assert_eq!(stdout(&o), "0");
    let o = wdc(&["run", "--machine", s(&m), "--input", "1", "--semiring", "nat_max"]);
    assert_eq!(stdout(&o), "3");
}

#[test]
fn strict_run_reports_live_branches() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "m.json", &machine_json("nat", &["qa"], &[("q0", "0", "q0", "0", 0, "1")]));
    let o = wdc(&["run", "--machine", s(&m), "--input", "0", "--max-steps", "10", "--strict"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("live branches"));
    let o = wdc(&["run", "--machine", s(&m), "--input", "0", "--max-steps", "10"]);
    assert_eq!(stdout(&o), "0");
}

#[test]
fn unit_weight_counter_counts_paths() {
    // two ways through every cell: 2^len accepting paths
    let d = TempDir::new().unwrap();
    let rules = [
        ("q0", "0", "q0", "0", 1, "1"),
        ("q0", "0", "q0", "1", 1, "1"),
        ("q0", "1", "q0", "1", 1, "1"),
        ("q0", "1", "q0", "0", 1, "1"),
        ("q0", "_", "qa", "_", 0, "1"),
    ];
    let m = put(d.path(), "m.json", &machine_json("nat", &["qa"], &rules));
    for w in ["", "0", "01", "110", "1011"] {
        let o = wdc(&["run", "--machine", s(&m), "--input", w]);
        assert_eq!(stdout(&o), (1u64 << w.len()).to_string(), "{w}");
    }
}

#[test]
fn compile_then_check() {
    let d = TempDir::new().unwrap();
    let corpus = [
        ("nat", "e:2", "sum x. exists y. e(x, y)"),
        ("nat", "p:1", "sumSO X:1. prod x. (X(x) -> p(x))"),
        ("nat_max", "e:2", "sum x. sum y. (e(x, y) ? c(3) (+) c(1))"),
        ("int_mod:2", "p:1", "sumSO X:1. (exists x. (X(x) & p(x)))"),
    ];
    for (sr, sig, src) in corpus {
        let f = put(d.path(), "f.wf", src);
        let out = d.path().join("m.json");
        let o = wdc(&["compile", "--semiring", sr, "--signature", sig, "--formula", s(&f), "-o", s(&out)]);
        assert!(o.status.success(), "{src}: {}", String::from_utf8_lossy(&o.stderr));
        let o = wdc(&["run", "--machine", s(&out), "--input", "0", "--max-steps", "100000"]);
        assert!(o.status.code() != Some(2), "{src}");
        let o = wdc(&["check", "--semiring", sr, "--signature", sig, "--formula", s(&f)]);
        assert!(o.status.success(), "{src}: {}", stdout(&o));
        assert!(stdout(&o).contains(" 0 failed"));
    }
}

#[test]
fn check_is_deterministic() {
    let d = TempDir::new().unwrap();
    let f = put(d.path(), "f.wf", "sum x. sum y. (e(x, y) ? c(2))");
    let args = ["check", "--semiring", "nat", "--signature", "e:2", "--formula", s(&f)];
    assert_eq!(wdc(&args).stdout, wdc(&args).stdout);
}

#[test]
fn decompile_without_accepting_states_is_zero() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "m.json", &machine_json("nat", &[], &[("q0", "1", "q1", "1", 1, "2")]));
    let out = d.path().join("phi.wf");
    let o = wdc(&["decompile", "--machine", s(&m), "--signature", "p:1", "-o", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for st in [
        r#"{"universe":1,"signature":{"p":1},"relations":{"p":[[0]]}}"#,
        r#"{"universe":2,"signature":{"p":1},"relations":{"p":[[1]]}}"#,
        r#"{"universe":2,"signature":{"p":1},"relations":{"p":[]}}"#,
    ] {
        let a = put(d.path(), "a.json", st);
        let o = wdc(&["eval", "--semiring", "nat", "--structure", s(&a), "--formula", s(&out)]);
        assert_eq!(stdout(&o), "0", "{st}");
    }
    let o = wdc(&["check", "--semiring", "nat", "--signature", "p:1", "--machine", s(&m)]);
    assert!(o.status.success());
}

#[test]
fn decompile_rejections() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "m.json", &machine_json("nat", &["qa"], &[("q0", "1", "qa", "1", 1, "2")]));
    let o = wdc(&["decompile", "--machine", s(&m), "--signature", "p:1", "--unordered"]);
    assert_eq!(o.status.code(), Some(6));
    let o = wdc(&["decompile", "--machine", s(&m), "--signature", "e:2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(6));
    let o = wdc(&["decompile", "--machine", s(&m), "--signature", "p:1", "--unordered", "--semiring", "nat_max"]);
    assert!(o.status.success());
}

#[test]
fn reduce_then_sat() {
    let d = TempDir::new().unwrap();
    let a = put(d.path(), "a.json", r#"{"universe":2}"#);
    let f = put(d.path(), "f.wf", "sumSO P:1. prod x. (P(x) ? c(2))");
    let p = d.path().join("p.prop");
    let o = wdc(&["reduce", "--semiring", "nat", "--structure", s(&a), "--formula", s(&f), "-o", s(&p)]);
    assert!(o.status.success());
    let o = wdc(&["sat", "--semiring", "nat", "--prop", s(&p)]);
    assert_eq!(stdout(&o), "9");
    let o = wdc(&["sat", "--semiring", "nat", "--prop", s(&p), "--max-vars", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let g = put(d.path(), "g.wf", "sum x. sumSO X:1. X(x)");
    let o = wdc(&["reduce", "--semiring", "nat", "--structure", s(&a), "--formula", s(&g)]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn semirings_lists_every_instance() {
    let o = wdc(&["semirings"]);
    let text = stdout(&o);
    for name in ["bool", "nat", "int_mod:2", "rat", "arctic", "trop", "langs", "nat_max"] {
        assert!(text.lines().any(|l| l.split('\t').next() == Some(name)), "{name}");
    }
}

#[test]
fn thread_cap_is_honored() {
    let d = TempDir::new().unwrap();
    let f = put(d.path(), "f.wf", "sum x. c(1)");
    let o = Command::new(env!("CARGO_BIN_EXE_wdc"))
        .args(["check", "--semiring", "nat", "--formula", s(&f), "--size-cap", "3"])
        .env("WDC_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
}
