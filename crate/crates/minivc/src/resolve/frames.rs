// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Syntactic frame checks.
//!
//! A function body and its precondition may dereference only arrays named
//! in its `reads` clause, directly or through the functions it applies. A
//! method may update (directly or through callees) only arrays named in its
//! `modifies` clause or allocated in its own body. Frames are compared by
//! the printed form of the array expression, after substituting actuals for
//! formals at each call.

use super::TypedProgram;
use crate::diagnostics::{Diagnostic, FrontKind};
use crate::syntax::ast::*;
use crate::syntax::pretty::expr_to_string;
use std::collections::{BTreeSet, HashMap};

pub fn check_frames(tp: &TypedProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for f in tp.functions() {
        let allowed: BTreeSet<String> = f.reads.iter().map(expr_to_string).collect();
        let mut check = |e: &Expr| reads_in(tp, e, &allowed, &f.name, &mut diags);
        f.requires.iter().for_each(&mut check);
        f.body.iter().for_each(&mut check);
    }
    for m in tp.methods() {
        let Some(body) = &m.body else { continue };
        let mut allowed: BTreeSet<String> = m.modifies.iter().map(expr_to_string).collect();
        for s in body {
            s.walk(&mut |s| match &s.kind {
                StmtKind::VarDecl { decls, rhs, .. } => {
                    for (d, r) in decls.iter().zip(rhs) {
                        if matches!(r, Rhs::ArrayAlloc { .. }) {
                            allowed.insert(d.name.clone());
                        }
                    }
                }
                StmtKind::Assign { lhs, rhs } => {
                    for (l, r) in lhs.iter().zip(rhs) {
                        if let (ExprKind::Var(v), Rhs::ArrayAlloc { .. }) = (&l.kind, r) {
                            allowed.insert(v.clone());
                        }
                    }
                }
                _ => {}
            });
        }
        for s in body {
            s.walk(&mut |s| match &s.kind {
                StmtKind::Assign { lhs, .. } => {
                    for l in lhs {
                        if let ExprKind::Index(a, _) = &l.kind {
                            let name = expr_to_string(a);
                            if !allowed.contains(&name) {
                                diags.push(Diagnostic::error(
                                    l.span.clone(),
                                    FrontKind::ModifiesViolation,
                                    format!("assignment to {name}[..] is not allowed by the modifies clause of {}", m.name),
                                ));
                            }
                        }
                    }
                }
                StmtKind::Call { callee, args, .. } => {
                    let Some(c) = tp.method(callee) else { return };
                    let sub: HashMap<&str, &Expr> =
                        c.ins.iter().map(|p| p.name.as_str()).zip(args).collect();
                    for fr in &c.modifies {
                        let actual = substitute(fr, &sub);
                        let name = expr_to_string(&actual);
                        if !allowed.contains(&name) {
                            diags.push(Diagnostic::error(
                                s.span.clone(),
                                FrontKind::ModifiesViolation,
                                format!("call to {callee} may modify {name}, which {} may not modify", m.name),
                            ));
                        }
                    }
                }
                _ => {}
            });
        }
    }
    diags
}

fn reads_in(
    tp: &TypedProgram,
    e: &Expr,
    allowed: &BTreeSet<String>,
    fname: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let mut bound: Vec<String> = Vec::new();
    walk_reads(tp, e, allowed, fname, &mut bound, diags);
}

fn walk_reads(
    tp: &TypedProgram,
    e: &Expr,
    allowed: &BTreeSet<String>,
    fname: &str,
    bound: &mut Vec<String>,
    diags: &mut Vec<Diagnostic>,
) {
    let deref = |a: &Expr, diags: &mut Vec<Diagnostic>| {
        let name = expr_to_string(a);
        if !allowed.contains(&name) {
            diags.push(Diagnostic::error(
                e.span.clone(),
                FrontKind::InsufficientReads,
                format!("{fname} reads {name} but its reads clause does not mention it"),
            ));
        }
    };
    match &e.kind {
        ExprKind::Index(a, _) | ExprKind::Slice(a, _, _) if a.ty().is_array() => deref(a, diags),
        ExprKind::FnCall(g, args) => {
            if let Some(callee) = tp.function(g) {
                let sub: HashMap<&str, &Expr> =
                    callee.params.iter().map(|p| p.name.as_str()).zip(args).collect();
                for r in &callee.reads {
                    let actual = substitute(r, &sub);
                    let name = expr_to_string(&actual);
                    if !allowed.contains(&name) {
                        diags.push(Diagnostic::error(
                            e.span.clone(),
                            FrontKind::InsufficientReads,
                            format!("{fname} calls {g}, which reads {name}, but its reads clause does not mention it"),
                        ));
                    }
                }
            }
        }
        _ => {}
    }
    if let ExprKind::Forall(vs, body) = &e.kind {
        let n = bound.len();
        bound.extend(vs.iter().map(|v| v.name.clone()));
        walk_reads(tp, body, allowed, fname, bound, diags);
        bound.truncate(n);
    } else {
        e.for_each_child(&mut |c| walk_reads(tp, c, allowed, fname, bound, diags));
    }
}

/// Replaces free variables by the given expressions.
pub(crate) fn substitute(e: &Expr, sub: &HashMap<&str, &Expr>) -> Expr {
    match &e.kind {
        ExprKind::Var(v) => match sub.get(v.as_str()) {
            Some(r) => (*r).clone(),
            None => e.clone(),
        },
        ExprKind::Forall(vs, _) => {
            let mut inner = sub.clone();
            for v in vs {
                inner.remove(v.name.as_str());
            }
            let mut out = e.clone();
            out.for_each_child_mut(&mut |c| *c = substitute(c, &inner));
            out
        }
        _ => {
            let mut out = e.clone();
            out.for_each_child_mut(&mut |c| *c = substitute(c, sub));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::resolve_and_typecheck;
    use crate::syntax::parse;

    fn frame_errors(src: &str) -> Vec<Diagnostic> {
        check_frames(&resolve_and_typecheck(&parse(src, "f.dfy").unwrap()).unwrap())
    }

    #[test]
    fn missing_reads_clause() {
        let d = frame_errors("predicate p(a: array<int>) requires a.Length > 0 { a[0] > 0 }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, FrontKind::InsufficientReads.into());
    }

    #[test]
    fn reads_is_transitive() {
        let d = frame_errors(
            "predicate p(a: array<int>) requires a.Length > 0 reads a { a[0] > 0 }\n\
             predicate q(b: array<int>) requires b.Length > 0 { p(b) }",
        );
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn modifies_violation_through_call() {
        let d = frame_errors(
            "method W(a: array<int>) requires a.Length > 0 modifies a { a[0] := 1; }\n\
             method M(a: array<int>) requires a.Length > 0 { W(a); }",
        );
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, FrontKind::ModifiesViolation.into());
    }

    #[test]
    fn fresh_arrays_are_writable() {
        let d = frame_errors("method M() { var b := new int[3]; b[0] := 1; }");
        assert!(d.is_empty(), "{d:?}");
    }
}
