// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Ground instances of user functions, computed by running them.
//!
//! When an obligation compares an integer constant with a literal
//! (`n == 0`, `k >= 1`), the values of heap-free applications over that
//! constant near the literal are computed with the interpreter and handed to
//! the solver as guarded equalities. Each fact is a consequence of the function definitions, so
//! adding it is sound; it just saves the solver from unfolding.

use crate::interp::{Interp, Value};
use crate::resolve::TypedProgram;
use crate::vcgen::term::{eq, implies, Fun, Op, Sort, Term};
use crate::vcgen::Obligation;
use std::collections::{BTreeMap, BTreeSet};

const MAX_FACTS: usize = 64;
const FACT_BUDGET: u64 = 200_000;

fn anchors(ob: &Obligation) -> BTreeMap<String, BTreeSet<i64>> {
    let mut out: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
    for t in ob.hypotheses.iter().chain([&ob.goal]) {
        t.walk(&mut |s| {
            if let Term::Op(Op::Eq | Op::Lt | Op::Le | Op::Gt | Op::Ge, a) = s {
                let pair = match (&a[0], &a[1]) {
                    (Term::Const(n, Sort::Int), Term::Int(v)) | (Term::Int(v), Term::Const(n, Sort::Int)) => {
                        Some((n, *v))
                    }
                    _ => None,
                };
                if let Some((n, v)) = pair {
                    let e = out.entry(n.clone()).or_default();
                    e.extend([v.saturating_sub(1), v, v.saturating_add(1)]);
                }
            }
        });
    }
    out
}

fn has_bound(t: &Term) -> bool {
    let mut b = false;
    t.walk(&mut |s| b |= matches!(s, Term::Bound(..)));
    b
}

fn applications(ob: &Obligation) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for t in ob.hypotheses.iter().chain([&ob.goal]) {
        t.walk(&mut |s| {
            if let Term::App(Fun::User { heaps, result, .. }, args) = s {
                if heaps.is_empty()
                    && matches!(result, Sort::Int | Sort::Bool)
                    && !has_bound(s)
                    && args.iter().all(|a| {
                        let mut cs = BTreeMap::new();
                        a.consts(&mut cs);
                        cs.values().all(|s| matches!(s, Sort::Int | Sort::Bool))
                    })
                {
                    out.insert(s.clone());
                }
            }
        });
    }
    out
}

fn lit(v: &Value) -> Option<Term> {
    match v {
        Value::Int(n) => Some(Term::Int(*n)),
        Value::Bool(b) => Some(Term::Bool(*b)),
        _ => None,
    }
}

fn run(tp: &TypedProgram, app: &Term, env: &BTreeMap<String, i64>) -> Option<Term> {
    let consts = |n: &str| env.get(n).map(|v| Value::Int(*v));
    let Term::App(Fun::User { name, .. }, args) = app else {
        return None;
    };
    let vals: Option<Vec<Value>> = args
        .iter()
        .map(|a| crate::interp::eval_term(tp, a, &consts, &|_| None))
        .collect();
    let mut it = Interp::new(tp, true);
    it.budget = FACT_BUDGET;
    lit(&it.call_function(name, vals?).ok()?)
}

/// Guarded ground equalities for the heap-free applications in `ob`.
pub fn ground_facts(tp: &TypedProgram, ob: &Obligation) -> Vec<Term> {
    let anchors = anchors(ob);
    let mut out = Vec::new();
    for app in applications(ob) {
        let mut cs = BTreeMap::new();
        app.consts(&mut cs);
        match cs.len() {
            0 => {
                if let Some(v) = run(tp, &app, &BTreeMap::new()) {
                    out.push(eq(app.clone(), v));
                }
            }
            1 => {
                let c = cs.keys().next().expect("one constant");
                for v in anchors.get(c).into_iter().flatten() {
                    let env = BTreeMap::from([(c.clone(), *v)]);
                    if let Some(r) = run(tp, &app, &env) {
                        out.push(implies(
                            eq(Term::Const(c.clone(), Sort::Int), Term::Int(*v)),
                            eq(app.clone(), r),
                        ));
                    }
                }
            }
            _ => {}
        }
        if out.len() >= MAX_FACTS {
            out.truncate(MAX_FACTS);
            break;
        }
    }
    out
}
