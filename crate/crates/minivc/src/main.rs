// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

use clap::{Parser, Subcommand};
use minivc::driver::{
    run_corpus, run_method_text, verify_file, CorpusError, DriverError, VerifyOptions, EXIT_ERRORS,
    EXIT_SETUP, EXIT_VERIFIED,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "minivc", version, about = "Auto-active verifier for a small annotated language")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Unfoldings of recursive functions available to the solver.
    #[arg(long, default_value_t = minivc::smt::DEFAULT_FUEL)]
    fuel: u32,
    /// Per-obligation solver timeout in seconds.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    /// Obligations solved concurrently.
    #[arg(long)]
    workers: Option<usize>,
    /// SMT-LIB2 solver executable; also read from MINIVC_SOLVER.
    #[arg(long, env = "MINIVC_SOLVER")]
    solver_path: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify every declaration of a program.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print the report as JSON on standard output.
        #[arg(long)]
        json: bool,
        /// Report the termination metric of every loop and recursive declaration.
        #[arg(long)]
        show_decreases: bool,
        /// Write one SMT-LIB2 script per obligation into this directory.
        #[arg(long, value_name = "DIR")]
        dump_smt: Option<PathBuf>,
    },
    /// Run a method with the reference interpreter.
    Run {
        file: PathBuf,
        method: String,
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
        /// Skip checking contracts, assertions and invariants at run time.
        #[arg(long)]
        no_check: bool,
    },
    /// Verify a directory of programs against a manifest.
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

fn options(s: &SolverArgs) -> Result<VerifyOptions, String> {
    if !(s.timeout.is_finite() && s.timeout > 0.0) {
        return Err(format!("invalid timeout {}", s.timeout));
    }
    let mut o = VerifyOptions {
        fuel: s.fuel,
        timeout: Duration::from_secs_f64(s.timeout),
        solver_path: s.solver_path.clone(),
        ..VerifyOptions::default()
    };
    if let Some(w) = s.workers {
        o.workers = w.max(1);
    }
    Ok(o)
}

fn setup_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("minivc: {msg}");
    ExitCode::from(EXIT_SETUP as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Verify {
            file,
            solver,
            json,
            show_decreases,
            dump_smt,
        } => {
            let mut opts = match options(&solver) {
                Ok(o) => o,
                Err(e) => return setup_error(e),
            };
            opts.show_decreases = show_decreases;
            opts.dump_smt = dump_smt;
            let report = match verify_file(&file, &opts) {
                Ok(r) => r,
                Err(e) => return setup_error(e),
            };
            eprint!("{}", minivc::driver::render_diagnostics(&report));
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
            } else {
                println!("{}", report.summary());
            }
            ExitCode::from(report.exit_code as u8)
        }
        Cmd::Run {
            file,
            method,
            args,
            no_check,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return setup_error(format!("cannot read {}: {e}", file.display())),
            };
            match run_method_text(&text, &file.display().to_string(), &method, &args, !no_check) {
                Ok(vals) => {
                    for (n, v) in vals {
                        println!("{n} = {v}");
                    }
                    ExitCode::from(EXIT_VERIFIED as u8)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Cmd::Corpus {
            dir,
            manifest,
            solver,
        } => {
            let opts = match options(&solver) {
                Ok(o) => o,
                Err(e) => return setup_error(e),
            };
            match run_corpus(&dir, &manifest, &opts) {
                Ok(summary) => {
                    for o in &summary.outcomes {
                        let mark = if o.passed { "PASS" } else { "FAIL" };
                        match &o.note {
                            Some(n) => println!("{mark} {} ({}) {n}", o.file, o.verdict.as_str()),
                            None => println!("{mark} {} ({})", o.file, o.verdict.as_str()),
                        }
                    }
                    println!("{} passed, {} failed", summary.passed(), summary.failed());
                    if summary.failed() == 0 {
                        ExitCode::from(EXIT_VERIFIED as u8)
                    } else {
                        ExitCode::from(EXIT_ERRORS as u8)
                    }
                }
                Err(CorpusError::Driver(DriverError::Solver(e))) => setup_error(e),
                Err(e) => setup_error(e),
            }
        }
    }
}
