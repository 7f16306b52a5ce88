#![allow(dead_code)]

use minivc::resolve::{resolve_and_typecheck, TypedProgram};
use minivc::syntax::parse;
use std::path::PathBuf;

pub const POSITIVE: &[&str] = &[
    "bubblesort_final.dfy",
    "compute5f_lemmas_detailed.dfy",
    "compute5f_lemmas_simplified.dfy",
    "create_array_ghost.dfy",
    "exp_plus3_chain.dfy",
    "factorial_final.dfy",
    "factorial_modular.dfy",
    "mutual_recursion_tuple.dfy",
];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn program(text: &str, name: &str) -> TypedProgram {
    let p = parse(text, name).unwrap_or_else(|e| panic!("{name}: {e:?}"));
    resolve_and_typecheck(&p).unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

pub fn corpus_program(name: &str) -> TypedProgram {
    program(&corpus_text(name), name)
}

/// A working solver, or `None` when tests needing one should be skipped.
pub fn solver() -> Option<minivc::smt::SolverConfig> {
    let cfg = minivc::smt::SolverConfig::default();
    match minivc::smt::probe_solver(&cfg) {
        Ok(()) => Some(cfg),
        Err(e) => {
            eprintln!("skipping: {e}");
            None
        }
    }
}

use minivc::interp::{Interp, Value};
use minivc::syntax::Type;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Argument before allocation: arrays are created fresh for every run.
#[derive(Clone, Debug)]
pub enum Arg {
    Val(Value),
    Array(Vec<i64>),
}

const INTS: std::ops::RangeInclusive<i64> = -3..=10;

fn data_values(tp: &TypedProgram, name: &str, depth: u32) -> Vec<Value> {
    let dt = tp.datatype(name).expect("datatype");
    let mut out = Vec::new();
    for c in &dt.ctors {
        let mut rows: Vec<Vec<Value>> = vec![vec![]];
        for f in &c.fields {
            let choices: Vec<Value> = match &f.ty {
                Type::Datatype(n, _) | Type::Named(n, _) if depth > 0 => data_values(tp, n, depth - 1),
                Type::Datatype(..) | Type::Named(..) => vec![],
                Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
                _ => (-1..=1).map(Value::Int).collect(),
            };
            rows = rows
                .into_iter()
                .flat_map(|r| {
                    choices.iter().map(move |v| {
                        let mut r = r.clone();
                        r.push(v.clone());
                        r
                    })
                })
                .collect();
        }
        out.extend(rows.into_iter().map(|r| Value::Data(c.name.clone(), r)));
    }
    out
}

/// Small input domain for one parameter type.
pub fn domain(tp: &TypedProgram, ty: &Type) -> Vec<Arg> {
    match ty {
        Type::Int => INTS.map(|n| Arg::Val(Value::Int(n))).collect(),
        Type::Bool => vec![Arg::Val(Value::Bool(false)), Arg::Val(Value::Bool(true))],
        Type::Array(_) => {
            let mut out = Vec::new();
            for len in 0..=4u32 {
                for code in 0..4usize.pow(len) {
                    out.push(Arg::Array((0..len).map(|p| (code / 4usize.pow(p) % 4) as i64 - 1).collect()));
                }
            }
            let mut rng = StdRng::seed_from_u64(7);
            for _ in 0..60 {
                let len = rng.gen_range(5..=6);
                out.push(Arg::Array((0..len).map(|_| rng.gen_range(INTS)).collect()));
            }
            out
        }
        Type::Datatype(n, _) | Type::Named(n, _) => data_values(tp, n, 3).into_iter().map(Arg::Val).collect(),
        _ => vec![],
    }
}

/// Runs every method and lemma of `tp` with contract checking over the
/// small input domain. Returns the number of runs and the faults raised by
/// runs whose precondition held.
pub fn runtime_sweep(tp: &TypedProgram) -> (usize, Vec<String>) {
    let mut runs = 0;
    let mut faults = Vec::new();
    for m in tp.methods() {
        if m.body.is_none() {
            continue;
        }
        let mut rows: Vec<Vec<Arg>> = vec![vec![]];
        for p in &m.ins {
            let d = domain(tp, &p.ty);
            rows = rows
                .into_iter()
                .flat_map(|r| {
                    d.iter().map(move |a| {
                        let mut r = r.clone();
                        r.push(a.clone());
                        r
                    })
                })
                .collect();
        }
        for row in rows {
            let mut it = Interp::new(tp, true);
            let args: Vec<Value> = row
                .iter()
                .map(|a| match a {
                    Arg::Val(v) => v.clone(),
                    Arg::Array(xs) => it.alloc(xs.iter().map(|x| Value::Int(*x)).collect()),
                })
                .collect();
            match it.method_requires_hold(&m.name, &args) {
                Ok(false) => continue,
                Ok(true) => {}
                Err(e) => {
                    faults.push(format!("{} {row:?}: requires: {e:?}", m.name));
                    continue;
                }
            }
            runs += 1;
            if let Err(e) = it.run_method(&m.name, args) {
                faults.push(format!("{} {row:?}: {} at {}", m.name, e.message, e.span.line));
            }
        }
    }
    (runs, faults)
}
