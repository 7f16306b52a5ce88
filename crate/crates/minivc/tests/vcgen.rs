mod common;

use common::{corpus_program, program, POSITIVE};
use minivc::diagnostics::ObligationKind;
use minivc::resolve::TypedProgram;
use minivc::syntax::{Stmt, StmtKind};
use minivc::vcgen::expr::Tr;
use minivc::vcgen::term::{and, implies, Term};
use minivc::vcgen::{vc_program, wp_stmt};

fn body<'a>(tp: &'a TypedProgram, m: &str) -> &'a [Stmt] {
    tp.method(m).unwrap().body.as_deref().unwrap()
}

fn asserted(tp: &TypedProgram, s: &Stmt) -> Term {
    let StmtKind::Assert(e) = &s.kind else { panic!("not an assert") };
    Tr::new(tp).expr(e)
}

#[test]
fn wp_of_assignment_is_substitution() {
    let tp = program(
        "function factorial(n: int): int requires n >= 0 { if n == 0 then 1 else n * factorial(n-1) }
         method M(n: int, i: int, f: int) {
           var f2 := f;
           f2 := f2 * (n-i);
           assert f2 * factorial(n-i-1) == factorial(n);
           assert (f2 * (n-i)) * factorial(n-i-1) == factorial(n);
         }",
        "wp.dfy",
    );
    let b = body(&tp, "M");
    let post = asserted(&tp, &b[2]);
    assert_eq!(wp_stmt(&tp, &b[1], post), asserted(&tp, &b[3]));
}

#[test]
fn wp_of_assume_is_implication() {
    let tp = program(
        "method M(x: int) { assume x > 0; assert x >= 1; }",
        "assume.dfy",
    );
    let b = body(&tp, "M");
    let StmtKind::Assume(phi) = &b[0].kind else { panic!() };
    let post = asserted(&tp, &b[1]);
    let expected = implies(Tr::new(&tp).expr(phi), post.clone());
    assert_eq!(wp_stmt(&tp, &b[0], post), expected);
}

#[test]
fn wp_of_assert_conjoins() {
    let tp = program("method M(x: int) { assert x > 0; assert x >= 1; }", "assert.dfy");
    let b = body(&tp, "M");
    let post = asserted(&tp, &b[1]);
    assert_eq!(wp_stmt(&tp, &b[0], post.clone()), and(vec![asserted(&tp, &b[0]), post]));
}

#[test]
fn detailed_calc_has_four_steps() {
    let tp = corpus_program("compute5f_lemmas_detailed.dfy");
    let vcs = vc_program(&tp);
    let lemma = vcs.iter().find(|d| d.decl == "DivBy5_Lemma").unwrap();
    let steps = lemma
        .obligations
        .iter()
        .filter(|o| o.kind == ObligationKind::CalcStep)
        .count();
    assert_eq!(steps, 4);
}

#[test]
fn single_line_calc_has_no_steps() {
    let tp = program("method M(x: int) { calc { x; } }", "calc.dfy");
    let vcs = vc_program(&tp);
    assert!(vcs[0].obligations.iter().all(|o| o.kind != ObligationKind::CalcStep));
}

fn shape(tp: &TypedProgram) -> Vec<(ObligationKind, Term, Term)> {
    vc_program(tp)
        .into_iter()
        .flat_map(|d| d.obligations)
        .map(|o| (o.kind, and(o.hypotheses), o.goal))
        .collect()
}

#[test]
fn separate_clauses_equal_their_conjunction() {
    let split = program(
        "method M(x: int, y: int) returns (z: int)
           requires x > 0
           requires y > x
           ensures z > 0
           ensures z > x
         { z := x + y; }",
        "split.dfy",
    );
    let joined = program(
        "method M(x: int, y: int) returns (z: int)
           requires x > 0 && y > x
           ensures z > 0 && z > x
         { z := x + y; }",
        "joined.dfy",
    );
    let (a, b) = (shape(&split), shape(&joined));
    let goals = |v: &[(ObligationKind, Term, Term)]| and(v.iter().map(|o| o.2.clone()).collect());
    assert_eq!(a.iter().map(|o| &o.1).collect::<Vec<_>>()[0], &b[0].1);
    assert_eq!(goals(&a), goals(&b));
}

#[test]
fn obligation_generation_is_deterministic() {
    for file in POSITIVE {
        let tp = corpus_program(file);
        assert_eq!(shape(&tp), shape(&corpus_program(file)), "{file}");
    }
}

#[test]
fn golden_obligation_counts() {
    let golden = [
        ("bubblesort_final.dfy", 63),
        ("compute5f_lemmas_detailed.dfy", 50),
        ("compute5f_lemmas_simplified.dfy", 33),
        ("create_array_ghost.dfy", 9),
        ("exp_plus3_chain.dfy", 10),
        ("factorial_final.dfy", 13),
        ("factorial_modular.dfy", 20),
        ("mutual_recursion_tuple.dfy", 9),
    ];
    for (file, n) in golden {
        assert_eq!(shape(&corpus_program(file)).len(), n, "{file}");
    }
}

#[test]
fn recursive_call_in_function_needs_precondition() {
    let tp = program(
        "function exp(x: int, e: int): int requires e >= 0 { if e == 0 then 1 else x * exp(x,e-1) }",
        "exp.dfy",
    );
    let vcs = vc_program(&tp);
    assert!(vcs[0]
        .obligations
        .iter()
        .any(|o| o.kind == ObligationKind::FunctionPrecondition));
}
