// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Orchestration: parse, resolve, generate obligations, solve them, and
//! aggregate the outcome into diagnostics, a report and an exit code.

mod corpus;

pub use corpus::{run_corpus, CorpusEntry, CorpusError, CorpusOutcome, CorpusSummary, ExpectedDiag};

use crate::diagnostics::{sort_diagnostics, Diagnostic, DiagKind, FrontKind, ObligationKind};
use crate::resolve::{check_frames, check_ghost, resolve_and_typecheck, TypedProgram};
use crate::span::SourceSpan;
use crate::smt::{self, Bindings, SolverConfig, SolverSetupError, Status};
use crate::syntax::{parse, Decl, StmtKind};
use crate::termination::{self, MetricReport, Origin};
use crate::vcgen::{vc_program, Obligation};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub const REPORT_SCHEMA: u32 = 1;

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_ERRORS: i32 = 1;
pub const EXIT_FRONT_END: i32 = 2;
pub const EXIT_SETUP: i32 = 3;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub fuel: u32,
    pub timeout: Duration,
    pub workers: usize,
    /// Falls back to `MINIVC_SOLVER`, then `z3` on the search path.
    pub solver_path: Option<PathBuf>,
    pub show_decreases: bool,
    pub dump_smt: Option<PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            fuel: smt::DEFAULT_FUEL,
            timeout: Duration::from_secs(10),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            solver_path: None,
            show_decreases: false,
            dump_smt: None,
        }
    }
}

impl VerifyOptions {
    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig {
            timeout: self.timeout,
            fuel: self.fuel,
            ..SolverConfig::default()
        };
        if let Some(p) = &self.solver_path {
            cfg.path = p.clone();
        }
        cfg
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(#[from] SolverSetupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProgramVerdict {
    Verified,
    /// Every obligation holds but lemmas or assumptions remain unproved.
    Incomplete,
    Errors,
    FrontEndErrors,
}

impl ProgramVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProgramVerdict::Verified => "verified",
            ProgramVerdict::Incomplete => "incomplete",
            ProgramVerdict::Errors => "errors",
            ProgramVerdict::FrontEndErrors => "front-end-errors",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ProgramVerdict::Verified => EXIT_VERIFIED,
            ProgramVerdict::Incomplete | ProgramVerdict::Errors => EXIT_ERRORS,
            ProgramVerdict::FrontEndErrors => EXIT_FRONT_END,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObligationResult {
    pub decl: String,
    pub kind: ObligationKind,
    pub line: u32,
    pub col: u32,
    pub label: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Bindings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DeclReport {
    pub decl: String,
    pub total: usize,
    pub proved: usize,
    pub failed: usize,
    pub unknown: usize,
    pub assumed_lemmas: usize,
    pub assumes: usize,
    pub guessed_metrics: Vec<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub file: String,
    pub verdict: ProgramVerdict,
    pub exit_code: i32,
    pub declarations: Vec<DeclReport>,
    pub obligations: Vec<ObligationResult>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<MetricReport>,
    pub wall_ms: u64,
}

impl VerificationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    /// `(kind, line)` of every error and warning.
    pub fn error_sites(&self) -> Vec<(String, u32)> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity != crate::diagnostics::Severity::Info)
            .map(|d| (d.kind.as_str().to_string(), d.span.line))
            .collect()
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let proved = self.obligations.iter().filter(|o| o.status == "proved").count();
        let total = self.obligations.len();
        let errors = self.errors().count();
        match self.verdict {
            ProgramVerdict::Verified => format!("{}: verified, {proved}/{total} obligations proved", self.file),
            ProgramVerdict::Incomplete => format!(
                "{}: incomplete, {proved}/{total} obligations proved but unproved lemmas or assumptions remain",
                self.file
            ),
            ProgramVerdict::Errors => format!("{}: {errors} error(s), {proved}/{total} obligations proved", self.file),
            ProgramVerdict::FrontEndErrors => format!("{}: {errors} error(s) before verification", self.file),
        }
    }
}

pub fn verify_file(path: &Path, opts: &VerifyOptions) -> Result<VerificationReport, DriverError> {
    let text = std::fs::read_to_string(path).map_err(|source| DriverError::Read {
        path: path.display().to_string(),
        source,
    })?;
    verify_source(&text, &path.display().to_string(), opts)
}

fn front_end_report(file: &str, mut diagnostics: Vec<Diagnostic>, start: Instant) -> VerificationReport {
    sort_diagnostics(&mut diagnostics);
    VerificationReport {
        schema: REPORT_SCHEMA,
        file: file.to_string(),
        verdict: ProgramVerdict::FrontEndErrors,
        exit_code: EXIT_FRONT_END,
        declarations: Vec::new(),
        obligations: Vec::new(),
        diagnostics,
        metrics: Vec::new(),
        wall_ms: start.elapsed().as_millis() as u64,
    }
}

/// Parses and resolves `text`, or returns the front-end diagnostics.
pub fn front_end(text: &str, file: &str) -> Result<TypedProgram, Vec<Diagnostic>> {
    let prog = parse(text, file)?;
    let tp = resolve_and_typecheck(&prog)?;
    let mut diags = check_ghost(&tp);
    diags.extend(check_frames(&tp));
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    Ok(tp)
}

pub fn verify_source(text: &str, file: &str, opts: &VerifyOptions) -> Result<VerificationReport, DriverError> {
    let start = Instant::now();
    let tp = match front_end(text, file) {
        Ok(tp) => tp,
        Err(diags) => return Ok(front_end_report(file, diags, start)),
    };
    let vcs = vc_program(&tp);
    let obligations: Vec<&Obligation> = vcs.iter().flat_map(|d| &d.obligations).collect();

    if let Some(dir) = &opts.dump_smt {
        dump_scripts(&tp, &vcs, dir, opts.fuel)?;
    }

    let cfg = opts.solver_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let verdicts: Vec<smt::Verdict> = pool.install(|| {
        obligations
            .par_iter()
            .map(|ob| smt::check(&tp, ob, &cfg))
            .collect::<Result<_, _>>()
    })?;

    let metrics = termination::report(&tp);
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    let mut results = Vec::new();
    let mut decls: Vec<DeclReport> = Vec::new();
    let mut k = 0;
    for d in &vcs {
        let mut rep = DeclReport {
            decl: d.decl.clone(),
            total: d.obligations.len(),
            ..DeclReport::default()
        };
        diagnostics.extend(d.diagnostics.iter().cloned());
        for ob in &d.obligations {
            let v = &verdicts[k];
            k += 1;
            rep.wall_ms += v.wall_ms;
            match &v.status {
                Status::Proved => rep.proved += 1,
                Status::Refuted { .. } => rep.failed += 1,
                _ => rep.unknown += 1,
            }
            let (model, detail) = match &v.status {
                Status::Refuted { model } => (Some(model.clone()), None),
                Status::Unknown { reason, model } => (model.clone(), Some(reason.clone())),
                Status::SolverError { message } => (None, Some(message.clone())),
                _ => (None, None),
            };
            if v.status != Status::Proved {
                diagnostics.push(obligation_diagnostic(ob, &v.status, &metrics));
            }
            results.push(ObligationResult {
                decl: ob.decl.clone(),
                kind: ob.kind,
                line: ob.span.line,
                col: ob.span.col,
                label: ob.label.clone(),
                status: v.status.as_str(),
                model,
                detail,
                wall_ms: v.wall_ms,
            });
        }
        rep.guessed_metrics = metrics
            .iter()
            .filter(|m| m.decl == d.decl && m.origin == Origin::Guessed && !m.metric.is_empty())
            .map(|m| m.metric.clone())
            .collect();
        decls.push(rep);
    }

    let incompleteness = incompleteness_warnings(&tp);
    for w in &incompleteness {
        if let Some(rep) = decls.iter_mut().find(|r| w.label.as_deref() == Some(r.decl.as_str())) {
            match w.kind {
                DiagKind::Front(FrontKind::LemmaAssumed) => rep.assumed_lemmas += 1,
                _ => rep.assumes += 1,
            }
        }
    }
    diagnostics.extend(incompleteness.iter().cloned());
    if opts.show_decreases {
        diagnostics.extend(metrics.iter().map(|m| metric_info(m, file)));
    }
    sort_diagnostics(&mut diagnostics);

    let verdict = if diagnostics.iter().any(Diagnostic::is_error) {
        ProgramVerdict::Errors
    } else if !incompleteness.is_empty() {
        ProgramVerdict::Incomplete
    } else {
        ProgramVerdict::Verified
    };
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        file: file.to_string(),
        verdict,
        exit_code: verdict.exit_code(),
        declarations: decls,
        obligations: results,
        diagnostics,
        metrics: if opts.show_decreases { metrics } else { Vec::new() },
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Writes `<decl>.<kind>.<index>.smt2` for every obligation, where `index`
/// is the obligation's position within its declaration.
fn dump_scripts(
    tp: &TypedProgram,
    vcs: &[crate::vcgen::DeclVcs],
    dir: &Path,
    fuel: u32,
) -> Result<(), DriverError> {
    let werr = |p: &Path, source| DriverError::Write {
        path: p.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| werr(dir, e))?;
    for d in vcs {
        for (i, ob) in d.obligations.iter().enumerate() {
            let path = dir.join(format!("{}.{}.{i}.smt2", ob.decl, ob.kind.as_str()));
            let script = smt::lower(tp, ob, fuel);
            std::fs::write(&path, script.text).map_err(|e| werr(&path, e))?;
        }
    }
    Ok(())
}

fn is_guessed_site(ob: &Obligation, metrics: &[MetricReport]) -> bool {
    metrics.iter().any(|m| {
        m.origin == Origin::Guessed
            && m.decl == ob.decl
            && (m.site == "recursion" || (m.line == ob.span.line && m.col == ob.span.col))
    })
}

fn obligation_diagnostic(ob: &Obligation, status: &Status, metrics: &[MetricReport]) -> Diagnostic {
    let termination = matches!(
        ob.kind,
        ObligationKind::DecreasesDecrease | ObligationKind::DecreasesBounded
    );
    let base = if termination && is_guessed_site(ob, metrics) {
        "cannot prove termination; no metric guessed proves termination, try supplying a decreases clause".to_string()
    } else {
        ob.kind.failure_message().to_string()
    };
    let (message, model) = match status {
        Status::Refuted { model } => (base, Some(model.clone())),
        Status::Unknown { model, .. } => {
            let hint = match model {
                Some(m) if !m.is_empty() => {
                    let b: Vec<String> = m.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    format!("; possible counterexample: {}", b.join(", "))
                }
                _ => String::new(),
            };
            (
                format!("{base} (not proved, try adding an assert or a lemma{hint})"),
                None,
            )
        }
        Status::Timeout => (format!("{base} (solver timed out)"), None),
        Status::SolverError { message } => (format!("{base} (solver error: {message})"), None),
        Status::Proved => unreachable!("proved obligations raise no diagnostic"),
    };
    let mut d = Diagnostic::error(ob.span.clone(), ob.kind, message);
    d.counterexample = model;
    d.label = Some(ob.label.clone());
    d
}

/// Warnings for bodiless lemmas and for `assume` statements. The label of
/// each warning is the enclosing declaration.
pub fn incompleteness_warnings(tp: &TypedProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for d in &tp.program.decls {
        let Decl::Method(m) = d else { continue };
        if m.is_lemma && m.body.is_none() {
            let mut w = Diagnostic::warning(
                m.span.clone(),
                FrontKind::LemmaAssumed,
                format!("lemma {} is assumed, not proved", m.name),
            );
            w.label = Some(m.name.clone());
            out.push(w);
        }
        for s in m.body.iter().flatten() {
            s.walk(&mut |s| {
                if let StmtKind::Assume(_) = &s.kind {
                    let mut w = Diagnostic::warning(
                        s.span.clone(),
                        FrontKind::AssumeRemaining,
                        "assume statement remains; the proof is incomplete",
                    );
                    w.label = Some(m.name.clone());
                    out.push(w);
                }
            });
        }
    }
    out
}

fn metric_info(m: &MetricReport, file: &str) -> Diagnostic {
    let span = SourceSpan::new(file.into(), m.line, m.col, 0);
    let origin = match m.origin {
        Origin::Guessed => "guessed",
        Origin::User => "explicit",
    };
    let text = if m.metric.is_empty() {
        format!("{} {}: no metric could be guessed", m.site, m.decl)
    } else {
        format!("{} {}: decreases {} ({origin})", m.site, m.decl, m.metric)
    };
    Diagnostic::info(span, FrontKind::GuessedMetric, text)
}

/// Diagnostics as `file:line:col: severity: kind: message` lines.
pub fn render_diagnostics(report: &VerificationReport) -> String {
    report.diagnostics.iter().map(|d| format!("{d}\n")).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{}", render_front(.0))]
    FrontEnd(Vec<Diagnostic>),
    #[error("{0}")]
    Usage(String),
    #[error("{}: runtime error: {}: {}", .0.span, .0.kind.as_str(), .0.message)]
    Fault(crate::interp::RuntimeFault),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Fault(_) => EXIT_ERRORS,
            _ => EXIT_FRONT_END,
        }
    }
}

fn render_front(ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Runs `method` on textual arguments with contract checking as requested.
/// Returns `name = value` pairs for the out-parameters, followed by the
/// final contents of array arguments.
pub fn run_method_text(
    text: &str,
    file: &str,
    method: &str,
    args: &[String],
    check_contracts: bool,
) -> Result<Vec<(String, String)>, RunError> {
    use crate::interp::{parse_value, Interp};
    let tp = front_end(text, file).map_err(RunError::FrontEnd)?;
    let m = tp
        .method(method)
        .ok_or_else(|| RunError::Usage(format!("no method named `{method}`")))?;
    if m.body.is_none() {
        return Err(RunError::Usage(format!("`{method}` has no body")));
    }
    if args.len() != m.ins.len() {
        return Err(RunError::Usage(format!(
            "`{method}` takes {} argument(s), got {}",
            m.ins.len(),
            args.len()
        )));
    }
    let mut it = Interp::new(&tp, check_contracts);
    let mut vals = Vec::new();
    for (p, a) in m.ins.iter().zip(args) {
        let v = parse_value(&mut it, a, &p.ty)
            .ok_or_else(|| RunError::Usage(format!("cannot read `{a}` as {} for `{}`", p.ty, p.name)))?;
        vals.push(v);
    }
    let outs = it.run_method(method, vals.clone()).map_err(RunError::Fault)?;
    let mut shown: Vec<(String, String)> = m
        .outs
        .iter()
        .zip(&outs)
        .map(|(p, v)| (p.name.clone(), it.show(v)))
        .collect();
    for (p, v) in m.ins.iter().zip(&vals) {
        if p.ty.is_array() {
            shown.push((p.name.clone(), it.show(v)));
        }
    }
    Ok(shown)
}
