// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Backward weakest preconditions over the same term language.
//!
//! Program variables are the constants named after them; the heap of
//! element sort `E` is the constant `heap<E>`. Well-formedness checks are
//! not included.

use super::calc::desugar_calc;
use super::expr::{heap_const, match_type, sort_of, Tr};
use super::term::*;
use crate::resolve::TypedProgram;
use crate::syntax::ast::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// `wp(s, post)`.
pub fn wp_stmt(tp: &TypedProgram, s: &Stmt, post: Term) -> Term {
    Wp { tp }.stmt(s, post)
}

struct Wp<'a> {
    tp: &'a TypedProgram,
}

fn sort(t: &Type) -> Sort {
    sort_of(t, &HashMap::new())
}

/// Universally closes `body` over the named constants.
fn close(consts: &[(String, Sort)], body: Term) -> Term {
    let names: BTreeSet<&String> = consts.iter().map(|(n, _)| n).collect();
    let b = body.map(&mut |t| match t {
        Term::Const(n, s) if names.contains(n) => Some(Term::Bound(n.clone(), s.clone())),
        _ => None,
    });
    forall(consts.to_vec(), Vec::new(), b)
}

impl<'a> Wp<'a> {
    fn tr(&self) -> Tr<'a> {
        Tr::new(self.tp)
    }

    fn block(&self, b: &[Stmt], post: Term) -> Term {
        b.iter().rev().fold(post, |q, s| self.stmt(s, q))
    }

    /// Substitution performing a simultaneous assignment.
    fn assignment(&self, lhs: &[Expr], vals: Vec<Term>) -> BTreeMap<String, Term> {
        let mut m = BTreeMap::new();
        let mut tr = self.tr();
        for (l, v) in lhs.iter().zip(vals) {
            match &l.kind {
                ExprKind::Var(n) => {
                    m.insert(n.clone(), v);
                }
                ExprKind::Index(a, i) => {
                    let el = sort(a.ty().elem().unwrap_or(&Type::Int));
                    let name = format!("heap<{}>", el.mangle());
                    let h = m.get(&name).cloned().unwrap_or_else(|| heap_const(&el));
                    let (at, it) = (tr.expr(a), tr.expr(i));
                    let row = store(select(h.clone(), at.clone()), it, v);
                    m.insert(name, store(h, at, row));
                }
                _ => {}
            }
        }
        m
    }

    fn stmt(&self, s: &Stmt, post: Term) -> Term {
        match &s.kind {
            StmtKind::VarDecl { decls, rhs, .. } => {
                if rhs.is_empty() {
                    let vs: Vec<(String, Sort)> = decls
                        .iter()
                        .map(|d| (d.name.clone(), sort(d.ty.as_ref().unwrap_or(&Type::Int))))
                        .collect();
                    return close(&vs, post);
                }
                let lhs: Vec<Expr> = decls
                    .iter()
                    .map(|d| {
                        let ty = d.ty.clone().unwrap_or(Type::Int);
                        Expr::typed(ExprKind::Var(d.name.clone()), d.span.clone(), ty)
                    })
                    .collect();
                self.assign(&lhs, rhs, post)
            }
            StmtKind::Assign { lhs, rhs } => self.assign(lhs, rhs, post),
            StmtKind::Call {
                targets,
                callee,
                args,
            } => self.call(targets, callee, args, post),
            StmtKind::If { cond, then, els } => {
                let c = self.tr().expr(cond);
                let a = self.block(then, post.clone());
                let b = match els {
                    Some(e) => self.block(e, post),
                    None => post,
                };
                and(vec![implies(c.clone(), a), implies(not(c), b)])
            }
            StmtKind::While {
                guard,
                invariants,
                body,
                ..
            } => {
                let mut tr = self.tr();
                let inv = and(invariants.iter().map(|i| tr.expr(i)).collect());
                let g = tr.expr(guard);
                let keep = implies(and(vec![inv.clone(), g.clone()]), self.block(body, inv.clone()));
                let exit = implies(and(vec![inv.clone(), not(g)]), post);
                and(vec![inv, close(&modified(body), and(vec![keep, exit]))])
            }
            StmtKind::Assert(e) => and(vec![self.tr().expr(e), post]),
            StmtKind::Assume(e) => implies(self.tr().expr(e), post),
            StmtKind::Calc { lines, ops, hints } => {
                self.block(&desugar_calc(lines, ops, hints, &s.span), post)
            }
            StmtKind::Match { scrutinee, cases } => {
                let t = self.tr().expr(scrutinee);
                let dt_sort = sort(scrutinee.ty());
                let Type::Datatype(dn, _) = scrutinee.ty() else {
                    return post;
                };
                let Some(dt) = self.tp.datatype(dn) else {
                    return post;
                };
                let mut arms = Vec::new();
                for c in cases {
                    let Some(ctor) = dt.ctors.iter().find(|k| k.name == c.ctor) else {
                        continue;
                    };
                    let mut m = BTreeMap::new();
                    for (b, f) in c.binders.iter().zip(&ctor.fields) {
                        let field = Fun::Field {
                            ctor: ctor.name.clone(),
                            field: f.name.clone(),
                            dt: dt_sort.clone(),
                            result: sort(b.ty.as_ref().unwrap_or(&Type::Int)),
                        };
                        m.insert(b.name.clone(), Term::app(field, vec![t.clone()]));
                    }
                    let is = Term::app(
                        Fun::IsCtor {
                            name: ctor.name.clone(),
                            dt: dt_sort.clone(),
                        },
                        vec![t.clone()],
                    );
                    arms.push(implies(is, self.block(&c.body, post.clone()).subst_consts(&m)));
                }
                and(arms)
            }
            StmtKind::Block(b) => self.block(b, post),
        }
    }

    fn assign(&self, lhs: &[Expr], rhs: &[Rhs], post: Term) -> Term {
        let mut tr = self.tr();
        let mut fresh = Vec::new();
        let mut facts = Vec::new();
        let vals: Vec<Term> = rhs
            .iter()
            .enumerate()
            .map(|(k, r)| match r {
                Rhs::Expr(e) => tr.expr(e),
                Rhs::ArrayAlloc { len, .. } => {
                    let name = format!("new%{k}");
                    let c = Term::Const(name.clone(), Sort::Ref);
                    fresh.push((name, Sort::Ref));
                    facts.push(not(eq(c.clone(), Term::Null)));
                    facts.push(eq(Term::app(Fun::Len, vec![c.clone()]), tr.expr(len)));
                    c
                }
            })
            .collect();
        let q = post.subst_consts(&self.assignment(lhs, vals));
        close(&fresh, implies(and(facts), q))
    }

    fn call(&self, targets: &[Expr], callee: &str, args: &[Expr], post: Term) -> Term {
        let Some(m) = self.tp.method(callee) else {
            return post;
        };
        let mut tm = HashMap::new();
        for (p, a) in m.ins.iter().zip(args) {
            match_type(&p.ty, a.ty(), &mut tm);
        }
        let tsub: HashMap<String, Sort> = m
            .type_params
            .iter()
            .map(|n| (n.clone(), sort(tm.get(n).unwrap_or(&Type::Int))))
            .collect();
        let mut tr = self.tr();
        let arg_terms: Vec<Term> = args.iter().map(|a| tr.expr(a)).collect();
        let mut callee_tr = Tr::new(self.tp);
        callee_tr.tsub = tsub.clone();
        callee_tr.vars = m
            .ins
            .iter()
            .map(|p| p.name.clone())
            .zip(arg_terms)
            .collect();
        let pre = and(m.requires.iter().map(|r| callee_tr.expr(r)).collect());

        let mut bound = Vec::new();
        for (k, p) in m.outs.iter().enumerate() {
            let name = format!("{}%{k}", p.name);
            let s = sort_of(&p.ty, &tsub);
            callee_tr.vars.insert(p.name.clone(), Term::Const(name.clone(), s.clone()));
            bound.push((name, s));
        }
        let mut heap_subst = BTreeMap::new();
        if !m.is_lemma {
            let els: BTreeSet<Sort> = m
                .modifies
                .iter()
                .filter_map(|e| e.ty().elem().map(|el| sort_of(el, &tsub)))
                .collect();
            for el in els {
                let name = format!("heap<{}>%", el.mangle());
                let h = Term::Const(name.clone(), Sort::Heap(Box::new(el.clone())));
                callee_tr.old_heaps.insert(el.clone(), heap_const(&el));
                callee_tr.heaps.insert(el.clone(), h.clone());
                heap_subst.insert(format!("heap<{}>", el.mangle()), h);
                bound.push((name, Sort::Heap(Box::new(el))));
            }
        }
        let ens = and(m.ensures.iter().map(|e| callee_tr.expr(e)).collect());
        let outs: Vec<Term> = bound
            .iter()
            .take(m.outs.len())
            .map(|(n, s)| Term::Const(n.clone(), s.clone()))
            .collect();
        let q = post
            .subst_consts(&heap_subst)
            .subst_consts(&self.assignment(targets, outs));
        and(vec![pre, close(&bound, implies(ens, q))])
    }
}

/// Variables and heaps a loop body may change.
fn modified(body: &[Stmt]) -> Vec<(String, Sort)> {
    let mut out = BTreeMap::new();
    let mut target = |l: &Expr| match &l.kind {
        ExprKind::Var(n) => {
            out.insert(n.clone(), sort(l.ty()));
        }
        ExprKind::Index(a, _) => {
            let el = sort(a.ty().elem().unwrap_or(&Type::Int));
            out.insert(format!("heap<{}>", el.mangle()), Sort::Heap(Box::new(el)));
        }
        _ => {}
    };
    for s in body {
        s.walk(&mut |s| match &s.kind {
            StmtKind::Assign { lhs, .. } => lhs.iter().for_each(&mut target),
            StmtKind::Call { targets, .. } => targets.iter().for_each(&mut target),
            _ => {}
        });
    }
    out.into_iter().collect()
}
