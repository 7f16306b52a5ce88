mod common;

use common::{corpus_program, corpus_text, program, solver};
use minivc::driver::{verify_source, VerifyOptions};
use minivc::interp::{eval_term, Value};
use minivc::resolve::TypedProgram;
use minivc::smt::{check, lower, SolverConfig, Status};
use minivc::vcgen::expr::Tr;
use minivc::vcgen::term::{and, Term};
use minivc::vcgen::{vc_program, wp_stmt, Obligation};
use std::collections::BTreeSet;
use std::time::Duration;

const EXP: &str = "function exp(x: int, e: int): int requires e >= 0 { if e == 0 then 1 else x * exp(x,e-1) }\n";

fn statuses(tp: &TypedProgram, cfg: &SolverConfig) -> Vec<(Obligation, Status)> {
    vc_program(tp)
        .into_iter()
        .flat_map(|d| d.obligations)
        .map(|o| {
            let v = check(tp, &o, cfg).unwrap();
            (o, v.status)
        })
        .collect()
}

fn all_proved(text: &str, cfg: &SolverConfig) -> bool {
    let tp = program(text, "t.dfy");
    statuses(&tp, cfg).iter().all(|(_, s)| *s == Status::Proved)
}

#[test]
fn base_case_of_exp_is_proved() {
    let Some(cfg) = solver() else { return };
    assert!(all_proved(&format!("{EXP}lemma L() ensures exp(2,0) == 1 {{}}"), &cfg));
}

#[test]
fn one_unfolding_hint_is_proved() {
    let Some(cfg) = solver() else { return };
    let text = format!("{EXP}lemma L(x: int, e: int) requires e >= 0 ensures x * exp(x,e) == exp(x,e+1) {{}}");
    assert!(all_proved(&text, &cfg));
}

#[test]
fn division_without_hint_is_unknown_not_refuted() {
    let Some(cfg) = solver() else { return };
    let tp = corpus_program("div_by5_no_hint.dfy");
    let failed: Vec<Status> = statuses(&tp, &cfg)
        .into_iter()
        .filter(|(_, s)| *s != Status::Proved)
        .map(|(_, s)| s)
        .collect();
    assert_eq!(failed.len(), 1);
    assert!(matches!(failed[0], Status::Unknown { .. } | Status::Timeout), "{:?}", failed[0]);
}

#[test]
fn broken_entry_is_refuted_at_zero() {
    let Some(cfg) = solver() else { return };
    let tp = corpus_program("factorial_broken_entry.dfy");
    let refuted: Vec<_> = statuses(&tp, &cfg)
        .into_iter()
        .filter_map(|(o, s)| match s {
            Status::Refuted { model } => Some((o, model)),
            _ => None,
        })
        .collect();
    assert!(!refuted.is_empty());
    for (o, model) in refuted {
        assert_eq!(model.get("n").map(String::as_str), Some("0"), "{}", o.label);
    }
}

#[test]
fn tiny_timeout_times_out() {
    let Some(mut cfg) = solver() else { return };
    cfg.timeout = Duration::from_micros(1000);
    let tp = corpus_program("bubblesort_final.dfy");
    let o = vc_program(&tp)
        .into_iter()
        .flat_map(|d| d.obligations)
        .find(|o| o.decl == "bubbleStep")
        .unwrap();
    assert_eq!(check(&tp, &o, &cfg).unwrap().status, Status::Timeout);
}

#[test]
fn missing_solver_is_a_setup_error() {
    let cfg = SolverConfig {
        path: "/nonexistent/solver".into(),
        ..SolverConfig::default()
    };
    assert!(minivc::smt::probe_solver(&cfg).is_err());
}

#[test]
fn lowering_is_deterministic() {
    for file in common::POSITIVE {
        let tp = corpus_program(file);
        for o in vc_program(&tp).into_iter().flat_map(|d| d.obligations) {
            let a = lower(&tp, &o, 2);
            let b = lower(&corpus_program(file), &o, 2);
            assert_eq!(a, b, "{file} {}", o.label);
            assert!(a.text.contains("(check-sat)"));
        }
    }
}

fn proved_sites(file: &str, fuel: u32) -> BTreeSet<(String, String, u32, u32, String)> {
    let opts = VerifyOptions {
        fuel,
        ..VerifyOptions::default()
    };
    let r = verify_source(&corpus_text(file), file, &opts).unwrap();
    r.obligations
        .into_iter()
        .filter(|o| o.status == "proved")
        .map(|o| (o.decl, o.kind.as_str().to_string(), o.line, o.col, o.label))
        .collect()
}

#[test]
fn more_fuel_never_loses_proofs() {
    if solver().is_none() {
        return;
    }
    let mut files: Vec<String> = std::fs::read_dir(common::corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".dfy"))
        .collect();
    files.sort();
    for file in files {
        let p: Vec<_> = [1, 2, 3].iter().map(|f| proved_sites(&file, *f)).collect();
        assert!(p[0].is_subset(&p[1]), "{file}: fuel 1 -> 2 lost {:?}", p[0].difference(&p[1]));
        assert!(p[1].is_subset(&p[2]), "{file}: fuel 2 -> 3 lost {:?}", p[1].difference(&p[2]));
    }
}

fn parse_binding(v: &str) -> Option<Value> {
    match v {
        "true" => Some(Value::Bool(true)),
        "false" => Some(Value::Bool(false)),
        _ => v.parse().ok().map(Value::Int),
    }
}

/// Rechecks a refutation from the printed model alone: constants from the
/// bindings, function applications by running the interpreter.
fn genuine(tp: &TypedProgram, o: &Obligation, model: &minivc::smt::Bindings) -> bool {
    let consts = |n: &str| model.get(n).and_then(|v| parse_binding(v));
    let apps = |_: &Term| None;
    let eval = |t: &Term| eval_term(tp, t, &consts, &apps);
    o.hypotheses.iter().all(|h| eval(h) == Some(Value::Bool(true))) && eval(&o.goal) == Some(Value::Bool(false))
}

#[test]
fn refutations_are_genuine() {
    let Some(cfg) = solver() else { return };
    let mut seen = 0;
    for entry in std::fs::read_dir(common::corpus_dir()).unwrap() {
        let name = entry.unwrap().file_name().to_string_lossy().into_owned();
        if !name.ends_with(".dfy") {
            continue;
        }
        let tp = corpus_program(&name);
        for (o, s) in statuses(&tp, &cfg) {
            if let Status::Refuted { model } = s {
                assert!(!o.formula().has_quantifier());
                assert!(genuine(&tp, &o, &model), "{name}: {} {model:?}", o.label);
                seen += 1;
            }
        }
    }
    assert!(seen > 0);
}

/// Backward route for a loop- and call-free method: requires ⟹ wp(body, ensures).
fn wp_obligation(tp: &TypedProgram, name: &str) -> Obligation {
    let m = tp.method(name).unwrap();
    let mut tr = Tr::new(tp);
    let post = and(m.ensures.iter().map(|e| tr.expr(e)).collect());
    let body = m.body.as_ref().unwrap();
    let goal = body.iter().rev().fold(post, |q, s| wp_stmt(tp, s, q));
    Obligation {
        decl: name.into(),
        kind: minivc::diagnostics::ObligationKind::Postcondition,
        span: m.span.clone(),
        label: "wp".into(),
        hypotheses: m.requires.iter().map(|e| tr.expr(e)).collect(),
        goal,
    }
}

#[test]
fn forward_and_backward_routes_agree() {
    let Some(cfg) = solver() else { return };
    let cases = [
        ("method M(x: int) returns (y: int) requires x > 0 ensures y > 1 { y := x + 1; }", true),
        ("method M(x: int) returns (y: int) requires x >= 0 ensures y > 1 { y := x + 1; }", false),
        ("method M(x: int) returns (y: int) ensures y >= 0 { if x < 0 { y := -x; } else { y := x; } }", true),
        ("method M(x: int) returns (y: int) ensures y > 0 { if x < 0 { y := -x; } else { y := x; } }", false),
        ("method M(x: int, z: int) returns (a: int, b: int) ensures a == z && b == x { a, b := z, x; }", true),
        ("method M(x: int) returns (y: int) { assume x > 3; y := x; assert y > 2; }", true),
        ("method M(x: int) returns (y: int) { y := x * x; assert y > 0; }", false),
    ];
    for (text, valid) in cases {
        let tp = program(text, "route.dfy");
        let forward = statuses(&tp, &cfg).iter().all(|(_, s)| *s == Status::Proved);
        let backward = check(&tp, &wp_obligation(&tp, "M"), &cfg).unwrap().status == Status::Proved;
        assert_eq!(forward, valid, "forward: {text}");
        assert_eq!(backward, valid, "backward: {text}");
    }
}

#[test]
fn replacing_asserts_by_assumes_keeps_validity() {
    let Some(cfg) = solver() else { return };
    for file in ["compute5f_lemmas_detailed.dfy", "compute5f_assume_a.dfy", "compute5f_assume_b.dfy"] {
        let text = corpus_text(file);
        let base = statuses(&program(&text, file), &cfg);
        let base_ok = base.iter().all(|(_, s)| *s == Status::Proved);
        let sites: Vec<usize> = text.match_indices("assert ").map(|(i, _)| i).collect();
        for at in sites {
            if text[..at].rsplit('\n').next().unwrap_or("").trim_start().starts_with("//") {
                continue;
            }
            let mut weak = text.clone();
            weak.replace_range(at..at + 6, "assume");
            let st = statuses(&program(&weak, file), &cfg);
            if base_ok {
                assert!(st.iter().all(|(_, s)| *s == Status::Proved), "{file} at byte {at}");
            }
            assert!(st.len() <= base.len());
        }
    }
}
