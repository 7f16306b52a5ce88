mod common;

use common::{corpus_program, program};
use minivc::interp::{Interp, Value};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn factorial(n: i64) -> i64 {
    (1..=n).product()
}

fn five_f(k: u32) -> i64 {
    let t1 = 2i128.pow(3 * k);
    let t2 = 3i128.pow(k);
    assert_eq!((t1 - t2) % 5, 0);
    (t1 - t2) as i64
}

fn ints(vs: &[Value]) -> Vec<i64> {
    vs.iter().map(|v| v.as_int().unwrap()).collect()
}

#[test]
fn compute_factorial_matches_product() {
    for file in ["factorial_final.dfy", "factorial_modular.dfy"] {
        let tp = corpus_program(file);
        for n in 0..=10 {
            let mut it = Interp::new(&tp, true);
            let out = it.run_method("computeFactorial", vec![Value::Int(n)]).unwrap();
            assert_eq!(out, vec![Value::Int(factorial(n))], "{file} n={n}");
            let f = it.call_function("factorial", vec![Value::Int(n)]).unwrap();
            assert_eq!(f, Value::Int(factorial(n)));
        }
    }
}

#[test]
fn compute5f_matches_closed_form() {
    for file in ["compute5f_lemmas_detailed.dfy", "compute5f_lemmas_simplified.dfy"] {
        let tp = corpus_program(file);
        for k in 1..=8u32 {
            let mut it = Interp::new(&tp, true);
            let out = it.run_method("compute5f", vec![Value::Int(k as i64)]).unwrap();
            assert_eq!(out, vec![Value::Int(five_f(k))], "{file} k={k}");
        }
    }
}

#[test]
fn small_function_values() {
    let tp = corpus_program("compute5f_lemmas_detailed.dfy");
    let mut it = Interp::new(&tp, true);
    assert_eq!(it.call_function("exp", vec![Value::Int(3), Value::Int(2)]), Ok(Value::Int(9)));
    assert_eq!(it.call_function("f", vec![Value::Int(2)]), Ok(Value::Int(11)));
    let err = it.call_function("exp", vec![Value::Int(3), Value::Int(-1)]).unwrap_err();
    assert_eq!(err.kind, minivc::interp::FaultKind::Precondition);
}

#[test]
fn multiset_ignores_order_but_not_multiplicity() {
    let tp = program(
        "method M() {
           var a := new int[2]; var b := new int[2]; var c := new int[1];
           a[0], a[1] := 2, 7; b[0], b[1] := 7, 2; c[0] := 2;
           assert multiset(a[..]) == multiset(b[..]);
           a[1] := 2;
           assert multiset(a[..]) != multiset(c[..]);
         }",
        "ms.dfy",
    );
    Interp::new(&tp, true).run_method("M", vec![]).unwrap();
    let ms = |xs: &[i64]| Value::multiset_of(&xs.iter().map(|x| Value::Int(*x)).collect::<Vec<_>>());
    assert_eq!(ms(&[2, 7]), ms(&[7, 2]));
    assert_ne!(ms(&[2, 2]), ms(&[2]));
}

fn sort_checked(it: &mut Interp, xs: &[i64]) -> Vec<i64> {
    let a = it.alloc(xs.iter().map(|x| Value::Int(*x)).collect());
    it.run_method("bubbleSort", vec![a.clone()])
        .unwrap_or_else(|e| panic!("{xs:?}: {e:?}"));
    ints(it.array(&a).unwrap())
}

fn expect_sorted(xs: &[i64], got: &[i64]) {
    let mut want = xs.to_vec();
    want.sort();
    assert_eq!(got, want.as_slice(), "input {xs:?}");
}

#[test]
fn bubble_sort_example() {
    let tp = corpus_program("bubblesort_final.dfy");
    let mut it = Interp::new(&tp, true);
    assert_eq!(sort_checked(&mut it, &[7, 2, 6, 3, 4]), vec![2, 3, 4, 6, 7]);
}

#[test]
fn bubble_sort_exhaustive_small_arrays() {
    let tp = corpus_program("bubblesort_final.dfy");
    let domain = [-1, 0, 1, 2];
    let mut count = 0;
    for len in 0..=6u32 {
        for code in 0..4usize.pow(len) {
            let xs: Vec<i64> = (0..len)
                .map(|p| domain[(code / 4usize.pow(p)) % 4])
                .collect();
            let mut it = Interp::new(&tp, true);
            let got = sort_checked(&mut it, &xs);
            expect_sorted(&xs, &got);
            count += 1;
        }
    }
    assert_eq!(count, 5461);
}

#[test]
fn bubble_sort_random_arrays() {
    let tp = corpus_program("bubblesort_final.dfy");
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..500 {
        let len = rng.gen_range(0..=12);
        let xs: Vec<i64> = (0..len).map(|_| rng.gen_range(-50..=50)).collect();
        let mut it = Interp::new(&tp, true);
        let got = sort_checked(&mut it, &xs);
        expect_sorted(&xs, &got);
    }
}

#[test]
fn unchecked_run_skips_contracts() {
    let tp = program(
        "method M(x: int) returns (y: int) ensures y == 0 { y := x; }",
        "m.dfy",
    );
    assert!(Interp::new(&tp, true).run_method("M", vec![Value::Int(1)]).is_err());
    assert_eq!(
        Interp::new(&tp, false).run_method("M", vec![Value::Int(1)]),
        Ok(vec![Value::Int(1)])
    );
}

#[test]
fn positive_corpus_runs_without_faults() {
    for file in common::POSITIVE {
        let tp = corpus_program(file);
        let (runs, faults) = common::runtime_sweep(&tp);
        assert!(runs > 0, "{file}: no admissible inputs");
        assert!(faults.is_empty(), "{file}: {} faults, first {}", faults.len(), faults[0]);
    }
}

#[test]
fn sweep_detects_a_broken_invariant() {
    let tp = corpus_program("factorial_broken_entry.dfy");
    let (_, faults) = common::runtime_sweep(&tp);
    assert!(!faults.is_empty());
}
