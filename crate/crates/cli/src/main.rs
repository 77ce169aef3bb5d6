//! `wdc`: evaluate weighted formulas, run weighted machines, translate
//! between the two, and reduce to weighted SAT.
//!
//! Exit codes: 0 ok, 1 i/o, 2 parse or bad input, 3 cap exceeded,
//! 4 live branches at the step limit, 5 crosscheck mismatch,
//! 6 formula outside the supported fragment or shape.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wdc_core::eval::{eval_with_stats, Assignment, Caps, EvalContext, EvalError};
use wdc_core::fagin::{compare, formula_to_wtm, structures_up_to, wtm_to_weso, wtm_to_weso_unordered, Clock, FaginError, Report};
use wdc_core::logic::{parse_formula, Formula, ParseError};
use wdc_core::machine::{behavior, MachineError, RunOptions, WeightedTm};
use wdc_core::satred::{cook_levin_reduce, parse_prop, sat_series, SatError, DEFAULT_VAR_CAP};
use wdc_core::semiring::{all_instances, SemiringError};
use wdc_core::structures::{Signature, Structure, StructureError};
use wdc_core::Semiring;

#[derive(Parser)]
#[command(name = "wdc", version, about = "Weighted descriptive complexity toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a formula on a structure.
    Eval {
        #[arg(long)]
        semiring: String,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        /// Free variables, as in `x=0,X={0,2},Y:2={(0,1)}`.
        #[arg(long)]
        assign: Option<String>,
        /// Print evaluation counters after the value.
        #[arg(long)]
        stats: bool,
        /// Evaluate second-order quantifiers without early cut-offs.
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Run a machine on an input word and print its behavior.
    Run {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        /// Override the machine file's semiring.
        #[arg(long)]
        semiring: Option<String>,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Fail with exit 4 if a branch is still running at the limit.
        #[arg(long)]
        strict: bool,
    },
    /// Translate a wESO sentence into a weighted machine.
    Compile {
        #[arg(long)]
        semiring: String,
        #[arg(long, default_value = "")]
        signature: String,
        #[arg(long)]
        formula: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a weighted machine into a wESO sentence.
    Decompile {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        signature: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        semiring: Option<String>,
        /// Quantify the order instead of using the built-in one.
        #[arg(long)]
        unordered: bool,
        /// Print the count of satisfying assignments instead of the value.
        #[arg(long)]
        count: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ground a sentence on a structure into a weighted propositional formula.
    Reduce {
        #[arg(long)]
        semiring: String,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sum a weighted propositional formula over all truth assignments.
    Sat {
        #[arg(long)]
        semiring: String,
        #[arg(long)]
        prop: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VAR_CAP)]
        max_vars: usize,
    },
    /// Compare a sentence or machine with its translation on all small structures.
    Check {
        #[arg(long)]
        semiring: String,
        #[arg(long, default_value = "")]
        signature: String,
        #[arg(long, conflicts_with = "machine", required_unless_present = "machine")]
        formula: Option<PathBuf>,
        #[arg(long)]
        machine: Option<PathBuf>,
        /// Time exponent for a machine subject.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        size_cap: usize,
        #[arg(long, default_value_t = 1 << 20)]
        max_steps: usize,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// List the registered semirings.
    Semirings,
}

#[derive(Args)]
struct CapArgs {
    /// Largest `n^k` a second-order quantifier may enumerate.
    #[arg(long)]
    max_subsets: Option<usize>,
    /// Stage limit for fixed points.
    #[arg(long)]
    max_stages: Option<u64>,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        let mut c = Caps::default();
        if let Some(b) = self.max_subsets {
            c.max_subset_base = b;
        }
        if self.max_stages.is_some() {
            c.max_stages = self.max_stages;
        }
        c
    }
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Parse(String),
    Cap(String),
    Live(String),
    Mismatch,
    Shape(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Live(_) => 4,
            Failure::Mismatch => 5,
            Failure::Shape(_) => 6,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Parse(m) => write!(f, "parse error: {m}"),
            Failure::Cap(m) => write!(f, "{m}"),
            Failure::Live(m) => write!(f, "live branches: {m}"),
            Failure::Mismatch => write!(f, "crosscheck found a mismatch"),
            Failure::Shape(m) => write!(f, "{m}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<SemiringError> for Failure {
    fn from(e: SemiringError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::EnumerationCap { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::CapExceeded(_) => Failure::Cap(e.to_string()),
            EvalError::BadLiteral { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Shape(e.to_string()),
        }
    }
}

impl From<MachineError> for Failure {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::LiveBranches { .. } => Failure::Live(e.to_string()),
            MachineError::Inapplicable | MachineError::ForeignWeight(_) => Failure::Shape(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

impl From<FaginError> for Failure {
    fn from(e: FaginError) -> Self {
        match e {
            FaginError::Machine(m) => m.into(),
            FaginError::Eval(m) => m.into(),
            FaginError::Structure(m) => m.into(),
            FaginError::BadLiteral { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Shape(e.to_string()),
        }
    }
}

impl From<SatError> for Failure {
    fn from(e: SatError) -> Self {
        match e {
            SatError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            SatError::Shape(_) => Failure::Shape(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

/// Read a file, or standard input for `-`.
fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            writeln!(io::stdout(), "{text}")?;
            Ok(())
        }
    }
}

fn semiring(name: &str) -> Result<Semiring, Failure> {
    Ok(name.parse::<Semiring>()?)
}

fn formula(path: &Path) -> Result<Formula, Failure> {
    Ok(parse_formula(&read(path)?)?)
}

fn structure(path: &Path) -> Result<Structure, Failure> {
    Ok(Structure::from_json(&read(path)?)?)
}

fn machine(path: &Path, sr: Option<&str>) -> Result<WeightedTm, Failure> {
    let sr = sr.map(semiring).transpose()?;
    Ok(WeightedTm::from_json(&read(path)?, sr)?)
}

fn signature(text: &str) -> Result<Signature, Failure> {
    if text.trim().is_empty() {
        return Ok(Signature::empty());
    }
    Ok(Signature::parse(text)?)
}

fn print_report(report: &Report, sr: &Semiring) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    writeln!(out, "structure\tformula\tmachine\tclock\tresult")?;
    for r in &report.rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.structure.to_json(),
            sr.format(&r.formula),
            sr.format(&r.machine),
            if r.within_clock { "full" } else { "cut" },
            if r.agrees() { "PASS" } else { "FAIL" }
        )?;
    }
    let failed = report.rows.iter().filter(|r| !r.agrees()).count();
    writeln!(out, "{} structures, {} failed", report.rows.len(), failed)?;
    if let Some(r) = report.first_counterexample() {
        writeln!(
            out,
            "first counterexample: {} formula={} machine={}",
            r.structure.to_json(),
            sr.format(&r.formula),
            sr.format(&r.machine)
        )?;
    }
    Ok(())
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Eval { semiring: s, structure: st, formula: f, assign, stats, no_prune, caps } => {
            let sr = semiring(&s)?;
            let a = structure(&st)?;
            let phi = formula(&f)?;
            let mut ctx = EvalContext::new(&a, &sr).with_caps(caps.caps());
            if let Some(text) = assign {
                ctx = ctx.with_assignment(Assignment::parse(&text, a.size()).map_err(Failure::Parse)?);
            }
            if no_prune {
                ctx = ctx.without_pruning();
            }
            let (v, st) = eval_with_stats(&phi, &ctx)?;
            println!("{}", sr.format(&v));
            if stats {
                println!("so_assignments {}", st.so_assignments);
                println!("pruned {}", st.pruned);
                println!("fixpoint_stages {}", st.fixpoint_stages);
                println!("closure_steps {}", st.closure_steps);
            }
        }
        Cmd::Run { machine: m, input, semiring: s, max_steps, strict } => {
            let m = machine(&m, s.as_deref())?;
            let w = m.word(&input)?;
            let opts = if strict { RunOptions::strict(max_steps) } else { RunOptions::new(max_steps) };
            println!("{}", m.semiring().format(&behavior(&m, &w, opts)?));
        }
        Cmd::Compile { semiring: s, signature: sig, formula: f, output } => {
            let sr = semiring(&s)?;
            let m = formula_to_wtm(&formula(&f)?, &signature(&sig)?, &sr)?;
            write_out(output.as_deref(), &m.to_json())?;
        }
        Cmd::Decompile { machine: m, signature: sig, k, semiring: s, unordered, count, output } => {
            let m = machine(&m, s.as_deref())?;
            let sig = signature(&sig)?;
            let dec = if unordered { wtm_to_weso_unordered(&m, &sig, k)? } else { wtm_to_weso(&m, &sig, k)? };
            let phi = if count { dec.count_sentence() } else { dec.sentence() };
            write_out(output.as_deref(), &phi.to_string())?;
        }
        Cmd::Reduce { semiring: s, structure: st, formula: f, output } => {
            let sr = semiring(&s)?;
            let p = cook_levin_reduce(&formula(&f)?, &structure(&st)?, &sr)?;
            write_out(output.as_deref(), &p.display(&sr).to_string())?;
        }
        Cmd::Sat { semiring: s, prop, max_vars } => {
            let sr = semiring(&s)?;
            let p = parse_prop(&read(&prop)?, &sr)?;
            println!("{}", sr.format(&sat_series(&p, &sr, max_vars)?));
        }
        Cmd::Check { semiring: s, signature: sig, formula: f, machine: m, k, size_cap, max_steps, caps } => {
            let sr = semiring(&s)?;
            let sig = signature(&sig)?;
            let structures = structures_up_to(&sig, size_cap)?;
            let report = match (f, m) {
                (Some(f), _) => {
                    let phi = formula(&f)?;
                    let m = formula_to_wtm(&phi, &sig, &sr)?;
                    compare(&phi, &m, &sr, Clock::Halting(max_steps), &structures, caps.caps())?
                }
                (None, Some(m)) => {
                    let m = machine(&m, Some(&s))?;
                    let phi = wtm_to_weso(&m, &sig, k)?.sentence();
                    compare(&phi, &m, &sr, Clock::Polynomial(k), &structures, caps.caps())?
                }
                (None, None) => return Err(Failure::Parse("one of --formula or --machine is required".into())),
            };
            print_report(&report, &sr)?;
            if !report.agrees() {
                return Err(Failure::Mismatch);
            }
        }
        Cmd::Semirings => {
            println!("name\tcommutative\tidempotent\tdescription");
            for sr in all_instances() {
                println!("{}\t{}\t{}\t{}", sr, sr.is_commutative(), sr.is_idempotent(), sr.describe());
            }
        }
    }
    Ok(())
}

fn init_threads() {
    if let Some(n) = std::env::var("WDC_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wdc: {e}");
            ExitCode::from(e.code())
        }
    }
}
