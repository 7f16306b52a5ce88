// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Ghost-flow checking.
//!
//! Ghost state (ghost locals, lemma and ghost-method calls, plain
//! `function`/`predicate` applications) must not influence compiled state.
//! Everything in a lemma or ghost method is ghost; in a compiled method, a
//! branch or loop whose guard is ghost is ghost as a whole.

use super::TypedProgram;
use crate::diagnostics::{Diagnostic, FrontKind};
use crate::syntax::ast::*;
use std::collections::BTreeSet;

pub fn check_ghost(tp: &TypedProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for m in tp.methods() {
        if m.ghost() {
            continue;
        }
        let Some(body) = &m.body else { continue };
        let mut cx = GhostCx {
            tp,
            ghost_vars: vec![BTreeSet::new()],
            diags: &mut diags,
        };
        cx.block(body, false);
    }
    diags
}

struct GhostCx<'a> {
    tp: &'a TypedProgram,
    ghost_vars: Vec<BTreeSet<String>>,
    diags: &'a mut Vec<Diagnostic>,
}

impl GhostCx<'_> {
    fn is_ghost_var(&self, n: &str) -> bool {
        for s in self.ghost_vars.iter().rev() {
            if s.contains(n) {
                return true;
            }
        }
        false
    }

    /// The first ghost ingredient of `e`, described for a message.
    fn ghost_part(&self, e: &Expr) -> Option<String> {
        let mut found = None;
        let mut bound: Vec<String> = Vec::new();
        fn go(cx: &GhostCx<'_>, e: &Expr, bound: &mut Vec<String>, found: &mut Option<String>) {
            if found.is_some() {
                return;
            }
            match &e.kind {
                ExprKind::Var(v) if !bound.contains(v) && cx.is_ghost_var(v) => {
                    *found = Some(format!("ghost variable {v}"));
                }
                ExprKind::FnCall(f, _) => {
                    if cx.tp.function(f).is_some_and(|f| !f.is_compiled) {
                        *found = Some(format!("ghost function {f}"));
                    } else {
                        e.for_each_child(&mut |c| go(cx, c, bound, found));
                    }
                }
                ExprKind::Old(_) => *found = Some("old".to_string()),
                ExprKind::Forall(..) => *found = Some("a quantifier".to_string()),
                ExprKind::MultisetOf(_) => *found = Some("a multiset".to_string()),
                _ => e.for_each_child(&mut |c| go(cx, c, bound, found)),
            }
        }
        go(self, e, &mut bound, &mut found);
        found
    }

    fn compiled_use(&mut self, e: &Expr, what: &str) {
        if let Some(g) = self.ghost_part(e) {
            self.diags.push(Diagnostic::error(
                e.span.clone(),
                FrontKind::GhostFlow,
                format!("{g} cannot be used in {what}"),
            ));
        }
    }

    fn target_is_ghost(&self, e: &Expr) -> bool {
        matches!(&e.kind, ExprKind::Var(v) if self.is_ghost_var(v))
    }

    fn assign_target(&mut self, target: &Expr, ghost_ctx: bool, rhs_ghost: Option<String>) {
        if self.target_is_ghost(target) {
            return;
        }
        if ghost_ctx {
            self.diags.push(Diagnostic::error(
                target.span.clone(),
                FrontKind::GhostFlow,
                "cannot assign to non-ghost state in a ghost context",
            ));
        } else if let Some(g) = rhs_ghost {
            self.diags.push(Diagnostic::error(
                target.span.clone(),
                FrontKind::GhostFlow,
                format!("{g} cannot flow into non-ghost state"),
            ));
        } else if let ExprKind::Index(a, i) = &target.kind {
            self.compiled_use(a, "compiled code");
            self.compiled_use(i, "compiled code");
        }
    }

    fn block(&mut self, b: &Block, ghost_ctx: bool) {
        self.ghost_vars.push(BTreeSet::new());
        for s in b {
            self.stmt(s, ghost_ctx);
        }
        self.ghost_vars.pop();
    }

    fn stmt(&mut self, s: &Stmt, ghost_ctx: bool) {
        match &s.kind {
            StmtKind::VarDecl { decls, ghost, rhs } => {
                if *ghost || ghost_ctx {
                    let scope = self.ghost_vars.last_mut().expect("scope");
                    scope.extend(decls.iter().map(|d| d.name.clone()));
                } else {
                    for r in rhs {
                        match r {
                            Rhs::Expr(e) => self.compiled_use(e, "a non-ghost variable"),
                            Rhs::ArrayAlloc { len, .. } => self.compiled_use(len, "an allocation"),
                        }
                    }
                }
            }
            StmtKind::Assign { lhs, rhs } => {
                for (l, r) in lhs.iter().zip(rhs) {
                    let g = match r {
                        Rhs::Expr(e) => self.ghost_part(e),
                        Rhs::ArrayAlloc { len, .. } => self.ghost_part(len),
                    };
                    self.assign_target(l, ghost_ctx, g);
                }
            }
            StmtKind::Call {
                targets,
                callee,
                args,
            } => {
                let Some(m) = self.tp.method(callee) else { return };
                if m.ghost() {
                    for t in targets {
                        if !self.target_is_ghost(t) {
                            self.diags.push(Diagnostic::error(
                                t.span.clone(),
                                FrontKind::GhostFlow,
                                format!("result of ghost method {callee} cannot flow into non-ghost state"),
                            ));
                        }
                    }
                    return;
                }
                if ghost_ctx {
                    self.diags.push(Diagnostic::error(
                        s.span.clone(),
                        FrontKind::GhostFlow,
                        format!("non-ghost method {callee} cannot be called in a ghost context"),
                    ));
                    return;
                }
                for a in args {
                    self.compiled_use(a, "a call argument");
                }
                for t in targets {
                    self.assign_target(t, false, None);
                }
            }
            StmtKind::If { cond, then, els } => {
                let g = ghost_ctx || self.ghost_part(cond).is_some();
                self.block(then, g);
                if let Some(els) = els {
                    self.block(els, g);
                }
            }
            StmtKind::While { guard, body, .. } => {
                let g = ghost_ctx || self.ghost_part(guard).is_some();
                self.block(body, g);
            }
            StmtKind::Match { scrutinee, cases } => {
                let g = ghost_ctx || self.ghost_part(scrutinee).is_some();
                for c in cases {
                    self.ghost_vars.push(if g {
                        c.binders.iter().map(|b| b.name.clone()).collect()
                    } else {
                        BTreeSet::new()
                    });
                    self.block(&c.body, g);
                    self.ghost_vars.pop();
                }
            }
            StmtKind::Calc { hints, .. } => {
                for h in hints {
                    self.block(h, true);
                }
            }
            StmtKind::Block(b) => self.block(b, ghost_ctx),
            StmtKind::Assert(_) | StmtKind::Assume(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::resolve_and_typecheck;
    use crate::syntax::parse;

    fn ghost_errors(src: &str) -> Vec<Diagnostic> {
        check_ghost(&resolve_and_typecheck(&parse(src, "g.dfy").unwrap()).unwrap())
    }

    #[test]
    fn ghost_into_compiled_is_rejected() {
        let d = ghost_errors("method M() returns (r: int) { ghost var g := 1; r := g; }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, FrontKind::GhostFlow.into());
    }

    #[test]
    fn ghost_counter_is_fine() {
        let d = ghost_errors(
            "method M(n: int) { var i := 0; ghost var c := 0; while i < n { i := i + 1; c := c + 1; } }",
        );
        assert!(d.is_empty(), "{d:?}");
    }

    #[test]
    fn ghost_guard_makes_branch_ghost() {
        let d = ghost_errors(
            "method M() returns (r: int) { ghost var g := 1; r := 0; if g > 0 { r := 1; } }",
        );
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn plain_function_is_ghost() {
        let d = ghost_errors("function f(x: int): int { x }\nmethod M() returns (r: int) { r := f(1); }");
        assert_eq!(d.len(), 1);
        let d = ghost_errors(
            "function method f(x: int): int { x }\nmethod M() returns (r: int) { r := f(1); }",
        );
        assert!(d.is_empty());
    }
}
