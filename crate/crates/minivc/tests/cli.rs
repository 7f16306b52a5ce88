mod common;

use std::path::Path;
use std::process::{Command, Output};

fn minivc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minivc"))
        .args(args)
        .env_remove("MINIVC_SOLVER")
        .output()
        .unwrap()
}

fn corpus(name: &str) -> String {
    common::corpus_dir().join(name).display().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn verified_program_exits_zero() {
    if common::solver().is_none() {
        return;
    }
    let o = minivc(&["verify", &corpus("factorial_final.dfy")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verified"));
}

#[test]
fn failing_and_incomplete_programs_exit_one() {
    if common::solver().is_none() {
        return;
    }
    for f in ["factorial_broken_entry.dfy", "compute5f_bodiless_lemmas.dfy", "bubblestep_assumes.dfy"] {
        assert_eq!(code(&minivc(&["verify", &corpus(f)])), 1, "{f}");
    }
}

#[test]
fn front_end_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dfy");
    std::fs::write(&bad, "method M( {").unwrap();
    let o = minivc(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.dfy:1:"));
    std::fs::write(&bad, "method M() { x := 1; }").unwrap();
    assert_eq!(code(&minivc(&["verify", bad.to_str().unwrap()])), 2);
}

#[test]
fn setup_errors_exit_three() {
    assert_eq!(code(&minivc(&["verify", "/nonexistent/x.dfy"])), 3);
    let o = minivc(&["verify", &corpus("factorial_final.dfy"), "--solver-path", "/nonexistent/z3"]);
    assert_eq!(code(&o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_minivc"))
        .args(["verify", &corpus("factorial_final.dfy")])
        .env("MINIVC_SOLVER", "/nonexistent/z3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert_eq!(code(&minivc(&["verify", &corpus("factorial_final.dfy"), "--timeout", "0"])), 3);
}

#[test]
fn json_report_is_versioned() {
    if common::solver().is_none() {
        return;
    }
    let o = minivc(&["verify", &corpus("factorial_broken_entry.dfy"), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "errors");
    assert_eq!(v["exit_code"], 1);
    let obs = v["obligations"].as_array().unwrap();
    assert!(obs.iter().any(|o| o["status"] == "refuted" && o["model"]["n"] == "0"));
    let diags = v["diagnostics"].as_array().unwrap();
    assert!(diags.iter().any(|d| d["kind"] == "invariant-entry"));
}

#[test]
fn json_is_deterministic_apart_from_timings() {
    if common::solver().is_none() {
        return;
    }
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        fn scrub(v: &mut serde_json::Value) {
            match v {
                serde_json::Value::Object(m) => {
                    m.remove("wall_ms");
                    m.values_mut().for_each(scrub);
                }
                serde_json::Value::Array(a) => a.iter_mut().for_each(scrub),
                _ => {}
            }
        }
        scrub(&mut v);
        v
    };
    let f = corpus("compute5f_no_lemmas.dfy");
    let a = strip(minivc(&["verify", &f, "--json", "--workers", "1"]));
    let b = strip(minivc(&["verify", &f, "--json", "--workers", "4"]));
    assert_eq!(a, b);
}

fn is_dump_name(name: &str) -> bool {
    let parts: Vec<&str> = name.split('.').collect();
    parts.len() == 4
        && !parts[0].is_empty()
        && parts[1].chars().all(|c| c.is_ascii_lowercase() || c == '-')
        && parts[2].parse::<usize>().is_ok()
        && parts[3] == "smt2"
}

#[test]
fn dump_smt_writes_one_script_per_obligation() {
    if common::solver().is_none() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let o = minivc(&[
        "verify",
        &corpus("factorial_final.dfy"),
        "--dump-smt",
        dir.path().to_str().unwrap(),
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), v["obligations"].as_array().unwrap().len());
    assert!(names.iter().all(|n| is_dump_name(n)), "{names:?}");
    assert!(names.contains(&"computeFactorial.postcondition.9.smt2".to_string()), "{names:?}");
    let text = std::fs::read_to_string(Path::new(dir.path()).join(&names[0])).unwrap();
    assert!(text.contains("(check-sat)"));
}

#[test]
fn show_decreases_reports_guesses() {
    if common::solver().is_none() {
        return;
    }
    let o = minivc(&["verify", &corpus("bubblesort_final.dfy"), "--show-decreases"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("decreases a.Length - i (guessed)"), "{err}");
    assert!(err.contains("decreases j - 0 (guessed)"), "{err}");
}

#[test]
fn run_prints_outputs() {
    let o = minivc(&["run", &corpus("factorial_final.dfy"), "computeFactorial", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "f = 120");
    let o = minivc(&["run", &corpus("bubblesort_final.dfy"), "bubbleSort", "[3,1,2]"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "a = [1, 2, 3]");
}

#[test]
fn run_reports_contract_violations() {
    let o = minivc(&["run", &corpus("factorial_final.dfy"), "computeFactorial", "-1"]);
    assert_eq!(code(&o), 1);
    let o = minivc(&["run", &corpus("factorial_final.dfy"), "noSuchMethod"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn corpus_command_matches_manifest() {
    if common::solver().is_none() {
        return;
    }
    let dir = common::corpus_dir();
    let manifest = dir.join("manifest.jsonl");
    let o = minivc(&["corpus", dir.to_str().unwrap(), "--manifest", manifest.to_str().unwrap()]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{out}");
    assert!(out.contains("22 passed, 0 failed"), "{out}");
}

#[test]
fn corpus_rejects_unlisted_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.dfy"), "method M() {}").unwrap();
    let manifest = dir.path().join("m.jsonl");
    std::fs::write(&manifest, "").unwrap();
    let o = minivc(&["corpus", dir.path().to_str().unwrap(), "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}
