mod common;

use common::corpus_program;
use minivc::interp::{eval_term, Value};
use minivc::resolve::TypedProgram;
use minivc::termination::{decrease_goals, lex_decrease, report, Origin};
use minivc::vcgen::term::{Sort, Term};
use proptest::prelude::*;

/// Strict lexicographic order, each component ordered by `<` and bounded
/// below by zero.
fn brute_force(old: &[i64], new: &[i64]) -> bool {
    for p in 0..old.len() {
        if new[p] != old[p] {
            return new[p] < old[p] && old[p] >= 0;
        }
    }
    false
}

fn tuple(xs: &[i64]) -> Vec<(Term, Sort)> {
    xs.iter().map(|x| (Term::Int(*x), Sort::Int)).collect()
}

fn eval(t: &Term) -> bool {
    let tp = empty();
    eval_term(&tp, t, &|_| None, &|_| None) == Some(Value::Bool(true))
}

fn empty() -> TypedProgram {
    common::program("", "empty.dfy")
}

fn tuples() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            proptest::collection::vec(-3i64..=3, n),
            proptest::collection::vec(-3i64..=3, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lexicographic_order_matches_brute_force((old, new) in tuples()) {
        let t = lex_decrease(&tuple(&old), &tuple(&new));
        prop_assert_eq!(eval(&t), brute_force(&old, &new));
    }

    #[test]
    fn split_goals_agree_with_single_component(old in -5i64..=5, new in -5i64..=5) {
        let goals = decrease_goals(&tuple(&[old]), &tuple(&[new]));
        prop_assert_eq!(goals.len(), 2);
        let all = goals.iter().all(|(_, g)| eval(g));
        prop_assert_eq!(all, brute_force(&[old], &[new]));
    }

    #[test]
    fn lexicographic_order_is_irreflexive(xs in proptest::collection::vec(-3i64..=3, 1..=4)) {
        prop_assert!(!eval(&lex_decrease(&tuple(&xs), &tuple(&xs))));
    }
}

fn guesses() -> Vec<(String, String)> {
    let files = [
        "factorial_final.dfy",
        "compute5f_lemmas_detailed.dfy",
        "bubblesort_final.dfy",
    ];
    files
        .iter()
        .flat_map(|f| report(&corpus_program(f)))
        .filter(|m| m.origin == Origin::Guessed)
        .map(|m| (m.decl, m.metric))
        .collect()
}

#[test]
fn guessed_metrics_match_expected() {
    let g = guesses();
    for (decl, metric) in [
        ("factorial", "n"),
        ("computeFactorial", "n - 1 - i"),
        ("compute5f", "k - i"),
        ("bubbleSort", "a.Length - i"),
        ("bubbleStep", "j - 0"),
    ] {
        assert!(
            g.contains(&(decl.to_string(), metric.to_string())),
            "{decl}: expected {metric}, got {g:?}"
        );
    }
}

#[test]
fn explicit_metric_is_not_guessed() {
    let tp = corpus_program("mutual_recursion_tuple.dfy");
    let r = report(&tp);
    assert!(!r.is_empty());
    assert!(r.iter().all(|m| m.origin != Origin::Guessed), "{r:?}");
}
