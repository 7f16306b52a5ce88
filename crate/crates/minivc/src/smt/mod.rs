// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Solving obligations with an external SMT-LIB2 solver.
//!
//! A `sat` (or `unknown`) answer only yields a candidate countermodel.
//! It is reported as a refutation when the obligation is quantifier-free
//! and the interpreter confirms that the model's values make every
//! hypothesis true and the goal false.

mod facts;
mod lower;
pub mod sexp;

pub use facts::ground_facts;
pub use lower::{fuel_term, fueled_functions, lower_script, sort_str, Printer, SOLVER_OPTIONS};

use crate::interp::{eval_term, Value};
use crate::resolve::TypedProgram;
use crate::vcgen::term::{Fun, Sort, Term};
use crate::vcgen::Obligation;
use serde::Serialize;
use sexp::Sexp;
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use wait_timeout::ChildExt;

pub const DEFAULT_FUEL: u32 = 2;

/// An SMT-LIB2 script plus the terms whose model values it requests.
#[derive(Clone, Debug, PartialEq)]
pub struct SmtScript {
    pub text: String,
    pub values: Vec<Term>,
}

/// Variable (or application) → printed value.
pub type Bindings = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Proved,
    Refuted { model: Bindings },
    Unknown { reason: String, model: Option<Bindings> },
    Timeout,
    SolverError { message: String },
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Refuted { .. } => "refuted",
            Status::Unknown { .. } => "unknown",
            Status::Timeout => "timeout",
            Status::SolverError { .. } => "solver-error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub status: Status,
    pub wall_ms: u64,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub timeout: Duration,
    pub fuel: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            path: std::env::var_os("MINIVC_SOLVER")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("z3")),
            timeout: Duration::from_secs(10),
            fuel: DEFAULT_FUEL,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverSetupError {
    #[error("cannot start solver `{path}`: {source}")]
    Spawn {
        path: String,
        source: std::io::Error,
    },
}

/// Checks that the configured solver can be started.
pub fn probe_solver(cfg: &SolverConfig) -> Result<(), SolverSetupError> {
    let out = run_solver_text("(check-sat)\n", cfg)?;
    let _ = out;
    Ok(())
}

/// Terms whose model values are requested: integer and boolean constants,
/// and heap-free applications of user functions outside quantifiers.
fn model_terms(ob: &Obligation) -> Vec<Term> {
    let mut consts = BTreeMap::new();
    for t in ob.hypotheses.iter().chain([&ob.goal]) {
        t.consts(&mut consts);
    }
    let mut out: Vec<Term> = consts
        .into_iter()
        .filter(|(_, s)| matches!(s, Sort::Int | Sort::Bool))
        .map(|(n, s)| Term::Const(n, s))
        .collect();
    let mut apps = std::collections::BTreeSet::new();
    for t in ob.hypotheses.iter().chain([&ob.goal]) {
        collect_apps(t, &mut apps);
    }
    out.extend(apps);
    out
}

fn collect_apps(t: &Term, out: &mut std::collections::BTreeSet<Term>) {
    match t {
        Term::Forall(..) => {}
        Term::App(Fun::User { heaps, result, .. }, args) => {
            if heaps.is_empty() && matches!(result, Sort::Int | Sort::Bool) {
                out.insert(t.clone());
            }
            args.iter().for_each(|a| collect_apps(a, out));
        }
        Term::Op(_, args) | Term::App(_, args) => args.iter().for_each(|a| collect_apps(a, out)),
        _ => {}
    }
}

pub fn lower(tp: &TypedProgram, ob: &Obligation, fuel: u32) -> SmtScript {
    let facts = ground_facts(tp, ob);
    let values = model_terms(ob);
    SmtScript {
        text: lower_script(tp, ob, fuel, &facts, &values),
        values,
    }
}

struct RawOutput {
    stdout: Option<String>,
    stderr: String,
    elapsed: Duration,
}

fn run_solver_text(script: &str, cfg: &SolverConfig) -> Result<RawOutput, SolverSetupError> {
    let start = Instant::now();
    let mut child = Command::new(&cfg.path)
        .arg("-in")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverSetupError::Spawn {
            path: cfg.path.display().to_string(),
            source,
        })?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let text = script.to_string();
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(text.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let mut stderr_pipe = child.stderr.take().expect("piped stderr");
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr_pipe.read_to_string(&mut s);
        s
    });
    let finished = matches!(child.wait_timeout(cfg.timeout), Ok(Some(_)));
    if !finished {
        let _ = child.kill();
        let _ = child.wait();
    }
    let _ = writer.join();
    let stdout = reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(RawOutput {
        stdout: finished.then_some(stdout),
        stderr,
        elapsed: start.elapsed(),
    })
}

fn value_of(s: &Sexp) -> Option<Value> {
    s.as_int()
        .map(Value::Int)
        .or_else(|| s.as_bool().map(Value::Bool))
}

fn display_name(t: &Term, p: &Printer) -> String {
    match t {
        Term::Const(n, _) => n.clone(),
        _ => p.term(t),
    }
}

/// Runs the solver on `script` and interprets the answer for `ob`.
pub fn run_solver(
    tp: &TypedProgram,
    ob: &Obligation,
    script: &SmtScript,
    cfg: &SolverConfig,
) -> Result<Verdict, SolverSetupError> {
    let raw = run_solver_text(&script.text, cfg)?;
    let status = match raw.stdout {
        Some(out) => classify(tp, ob, script, cfg, &out, &raw.stderr),
        None => Status::Timeout,
    };
    Ok(Verdict {
        status,
        wall_ms: raw.elapsed.as_millis() as u64,
    })
}

fn solver_error(stdout: &str, stderr: &str) -> Status {
    let mut msg = stdout.trim().to_string();
    if !stderr.trim().is_empty() {
        msg = format!("{msg} {}", stderr.trim()).trim().to_string();
    }
    Status::SolverError { message: msg }
}

fn classify(
    tp: &TypedProgram,
    ob: &Obligation,
    script: &SmtScript,
    cfg: &SolverConfig,
    stdout: &str,
    stderr: &str,
) -> Status {
    let Some(items) = sexp::parse_all(stdout) else {
        return Status::SolverError {
            message: format!("malformed solver output: {}", stdout.trim()),
        };
    };
    let items: Vec<Sexp> = items
        .into_iter()
        .filter(|s| !matches!(s, Sexp::Atom(a) if a == "success" || a == "unsupported"))
        .collect();
    let answer = items.first().map(|s| s.to_string()).unwrap_or_default();
    match answer.as_str() {
        "unsat" => return Status::Proved,
        "sat" | "unknown" => {}
        "timeout" => return Status::Timeout,
        _ => return solver_error(stdout, stderr),
    }
    // Model values, positionally matched with the requested terms.
    let mut values: BTreeMap<Term, Value> = BTreeMap::new();
    if let Some(Sexp::List(pairs)) = items.get(1) {
        for (t, pair) in script.values.iter().zip(pairs) {
            if let Sexp::List(p) = pair {
                if let Some(v) = p.get(1).and_then(value_of) {
                    values.insert(t.clone(), v);
                }
            }
        }
    }
    let fueled = fueled_functions(tp);
    let printer = Printer {
        fueled: &fueled,
        fuel: fuel_term(cfg.fuel),
    };
    let model: Bindings = values
        .iter()
        .filter(|(t, _)| matches!(t, Term::Const(..)))
        .map(|(t, v)| (display_name(t, &printer), format!("{}", crate::interp::Show(v, &[]))))
        .collect();
    let model = (!values.is_empty()).then_some(model);
    if answer == "unknown" && values.is_empty() {
        return Status::Unknown {
            reason: "solver answered unknown".into(),
            model: None,
        };
    }
    let quantified = ob.hypotheses.iter().chain([&ob.goal]).any(Term::has_quantifier);
    if quantified {
        return Status::Unknown {
            reason: "candidate countermodel (quantified obligation)".into(),
            model,
        };
    }
    if confirm(tp, ob, &values) {
        Status::Refuted {
            model: model.unwrap_or_default(),
        }
    } else {
        Status::Unknown {
            reason: "candidate countermodel not confirmed by evaluation".into(),
            model,
        }
    }
}

/// Whether the model's constants make all hypotheses true and the goal
/// false. Function applications are computed by the interpreter; the model's
/// values for them are never trusted.
pub fn confirm(tp: &TypedProgram, ob: &Obligation, values: &BTreeMap<Term, Value>) -> bool {
    let consts = |n: &str| {
        values
            .iter()
            .find(|(t, _)| matches!(t, Term::Const(m, _) if m == n))
            .map(|(_, v)| v.clone())
    };
    let apps = |_: &Term| None;
    let holds = |t: &Term| eval_term(tp, t, &consts, &apps) == Some(Value::Bool(true));
    ob.hypotheses.iter().all(holds)
        && eval_term(tp, &ob.goal, &consts, &apps) == Some(Value::Bool(false))
}

/// Lowers and solves one obligation.
pub fn check(tp: &TypedProgram, ob: &Obligation, cfg: &SolverConfig) -> Result<Verdict, SolverSetupError> {
    let script = lower(tp, ob, cfg.fuel);
    run_solver(tp, ob, &script, cfg)
}
