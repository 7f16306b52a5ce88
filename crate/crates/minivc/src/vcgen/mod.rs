// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verification-condition generation.
//!
//! Method bodies are executed symbolically, front to back: assignments
//! substitute terms, and fresh constants are introduced only where values
//! become unknown (control-flow merges, loop havoc, call results,
//! allocation). Every obligation carries the full path hypotheses under
//! which it must hold, which makes this the weakest-precondition calculus
//! evaluated with sharing; [`wp_stmt`] is the textbook backward form used
//! to cross-check it.

mod calc;
mod exec;
pub mod expr;
pub mod term;
mod wp;

pub use calc::{compose, desugar_calc};
pub use wp::wp_stmt;

use crate::diagnostics::{Diagnostic, ObligationKind};
use crate::resolve::TypedProgram;
use crate::span::SourceSpan;
use crate::syntax::ast::*;
use exec::Exec;
use expr::Tr;
use std::collections::BTreeMap;
use term::Term;

/// One verification condition: valid iff `hypotheses ⟹ goal` is.
#[derive(Clone, Debug, PartialEq)]
pub struct Obligation {
    pub decl: String,
    pub kind: ObligationKind,
    pub span: SourceSpan,
    /// What exactly is being proved, e.g. `assertion x > 0`.
    pub label: String,
    pub hypotheses: Vec<Term>,
    pub goal: Term,
}

impl Obligation {
    /// `hypotheses ⟹ goal` as a single term.
    pub fn formula(&self) -> Term {
        term::implies(term::and(self.hypotheses.clone()), self.goal.clone())
    }
}

/// Obligations of one declaration, plus diagnostics raised while generating
/// them (e.g. a loop whose metric cannot be guessed).
#[derive(Clone, Debug, Default)]
pub struct DeclVcs {
    pub decl: String,
    pub obligations: Vec<Obligation>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Obligations for a method or lemma. Bodiless declarations have none; their
/// contracts are used at call sites.
pub fn vc_method(m: &Method, tp: &TypedProgram) -> DeclVcs {
    let mut ex = Exec::new(tp, &m.name);
    if let Some(body) = &m.body {
        ex.method(m, body);
    }
    ex.finish()
}

/// Obligations for a function body: callee preconditions, division,
/// indexing and destructor checks, and termination of recursive calls.
pub fn vc_function(f: &Function, tp: &TypedProgram) -> DeclVcs {
    let mut ex = Exec::new(tp, &f.name);
    if let Some(body) = &f.body {
        ex.function(f, body);
    }
    ex.finish()
}

/// Obligations for every method, lemma and function, in declaration order.
pub fn vc_program(tp: &TypedProgram) -> Vec<DeclVcs> {
    tp.program
        .decls
        .iter()
        .filter_map(|d| match d {
            Decl::Method(m) => Some(vc_method(m, tp)),
            Decl::Function(f) => Some(vc_function(f, tp)),
            Decl::Datatype(_) => None,
        })
        .collect()
}

/// Translates a two-state expression: `old(..)` reads `old_heaps`, everything
/// else reads `heaps`. Local variables are never affected by `old`.
pub fn encode_old(
    tp: &TypedProgram,
    e: &Expr,
    vars: &BTreeMap<String, Term>,
    heaps: &BTreeMap<term::Sort, Term>,
    old_heaps: &BTreeMap<term::Sort, Term>,
) -> Term {
    let mut tr = Tr::new(tp);
    tr.vars = vars.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    tr.heaps = heaps.clone();
    tr.old_heaps = old_heaps.clone();
    tr.expr(e)
}
