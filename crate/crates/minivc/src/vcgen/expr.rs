// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Expression translation with well-formedness checks.
//!
//! Checks are collected left to right. The right operand of `&&`, `||`,
//! `==>` and the branches of `if-then-else` are checked under the
//! condition that makes them evaluated; checks inside a quantifier are
//! universally closed over its bound variables.

use super::term::*;
use crate::diagnostics::ObligationKind;
use crate::resolve::TypedProgram;
use crate::span::SourceSpan;
use crate::syntax::ast::*;
use crate::syntax::pretty::expr_to_string;
use crate::termination;
use std::collections::{BTreeMap, HashMap};

/// A pending well-formedness (or termination) check.
#[derive(Clone, Debug)]
pub struct WfCheck {
    pub kind: ObligationKind,
    pub span: SourceSpan,
    pub goal: Term,
    pub label: String,
}

enum Frame {
    Guard(Term),
    Bind(Vec<(String, Sort)>),
}

/// Recursion context: inside the body of a function whose calls to members
/// of its own strongly connected component must decrease `metric`.
#[derive(Clone, Debug)]
pub struct RecCtx {
    pub caller: String,
    pub metric: Vec<(Term, Sort)>,
}

pub fn sort_of(t: &Type, tsub: &HashMap<String, Sort>) -> Sort {
    match t {
        Type::Int | Type::Infer(_) => Sort::Int,
        Type::Bool => Sort::Bool,
        Type::Array(_) | Type::Null => Sort::Ref,
        Type::Seq(e) => Sort::Seq(Box::new(sort_of(e, tsub))),
        Type::Multiset(e) => Sort::Multiset(Box::new(sort_of(e, tsub))),
        Type::TypeVar(n) => tsub.get(n).cloned().unwrap_or_else(|| Sort::Param(n.clone())),
        Type::Datatype(n, args) | Type::Named(n, args) => {
            Sort::Data(n.clone(), args.iter().map(|a| sort_of(a, tsub)).collect())
        }
    }
}

/// Binds the type parameters occurring in `pat` by matching against `actual`.
pub fn match_type(pat: &Type, actual: &Type, m: &mut HashMap<String, Type>) {
    match (pat, actual) {
        (Type::TypeVar(n), t) => {
            m.entry(n.clone()).or_insert_with(|| t.clone());
        }
        (Type::Array(a), Type::Array(b))
        | (Type::Seq(a), Type::Seq(b))
        | (Type::Multiset(a), Type::Multiset(b)) => match_type(a, b, m),
        (Type::Datatype(_, xs), Type::Datatype(_, ys)) => {
            for (x, y) in xs.iter().zip(ys) {
                match_type(x, y, m);
            }
        }
        _ => {}
    }
}

/// Element sorts of the arrays a function reads, in a canonical order.
pub fn fn_heap_sorts(f: &Function, tsub: &HashMap<String, Sort>) -> Vec<Sort> {
    let mut v: Vec<Sort> = f
        .reads
        .iter()
        .filter_map(|r| r.ty().elem().map(|e| sort_of(e, tsub)))
        .collect();
    v.sort();
    v.dedup();
    v
}

pub fn heap_const(elem: &Sort) -> Term {
    Term::Const(
        format!("heap<{}>", elem.mangle()),
        Sort::Heap(Box::new(elem.clone())),
    )
}

pub struct Tr<'a> {
    pub tp: &'a TypedProgram,
    pub vars: HashMap<String, Term>,
    pub heaps: BTreeMap<Sort, Term>,
    pub old_heaps: BTreeMap<Sort, Term>,
    pub tsub: HashMap<String, Sort>,
    /// `None` disables well-formedness collection.
    pub checks: Option<Vec<WfCheck>>,
    pub rec: Option<RecCtx>,
    frames: Vec<Frame>,
    in_old: bool,
}

impl<'a> Tr<'a> {
    pub fn new(tp: &'a TypedProgram) -> Self {
        Tr {
            tp,
            vars: HashMap::new(),
            heaps: BTreeMap::new(),
            old_heaps: BTreeMap::new(),
            tsub: HashMap::new(),
            checks: None,
            rec: None,
            frames: Vec::new(),
            in_old: false,
        }
    }

    pub fn with_checks(mut self) -> Self {
        self.checks = Some(Vec::new());
        self
    }

    pub fn take_checks(&mut self) -> Vec<WfCheck> {
        self.checks.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn sort(&self, t: &Type) -> Sort {
        sort_of(t, &self.tsub)
    }

    pub fn heap(&mut self, elem: &Sort) -> Term {
        let map = if self.in_old {
            &mut self.old_heaps
        } else {
            &mut self.heaps
        };
        map.entry(elem.clone())
            .or_insert_with(|| heap_const(elem))
            .clone()
    }

    fn check(&mut self, kind: ObligationKind, span: &SourceSpan, goal: Term, label: String) {
        if self.checks.is_none() || goal == Term::Bool(true) {
            return;
        }
        let mut g = goal;
        for fr in self.frames.iter().rev() {
            g = match fr {
                Frame::Guard(c) => implies(c.clone(), g),
                Frame::Bind(vs) => forall(vs.clone(), Vec::new(), g),
            };
        }
        if let Some(cs) = &mut self.checks {
            cs.push(WfCheck {
                kind,
                span: span.clone(),
                goal: g,
                label,
            });
        }
    }

    fn guarded<T>(&mut self, g: Term, f: impl FnOnce(&mut Self) -> T) -> T {
        self.frames.push(Frame::Guard(g));
        let r = f(self);
        self.frames.pop();
        r
    }

    /// A translator for a callee's clauses: parameters bound to `args`,
    /// sharing this translator's (current or old) heaps.
    fn callee(&self, params: &[Param], args: Vec<Term>, tsub: HashMap<String, Sort>) -> Tr<'a> {
        let heaps = if self.in_old {
            self.old_heaps.clone()
        } else {
            self.heaps.clone()
        };
        let mut t = Tr::new(self.tp);
        t.vars = params.iter().map(|p| p.name.clone()).zip(args).collect();
        t.heaps = heaps.clone();
        t.old_heaps = heaps;
        t.tsub = tsub;
        t
    }

    fn non_null(&mut self, a: &Expr, at: &Term, span: &SourceSpan) {
        let label = format!("target {} might be null", expr_to_string(a));
        self.check(ObligationKind::NullDeref, span, not(eq(at.clone(), Term::Null)), label);
    }

    pub fn expr(&mut self, e: &Expr) -> Term {
        match &e.kind {
            ExprKind::IntLit(n) => int(*n),
            ExprKind::BoolLit(b) => Term::Bool(*b),
            ExprKind::Null => Term::Null,
            ExprKind::Var(v) => self
                .vars
                .get(v)
                .cloned()
                .unwrap_or_else(|| Term::Const(v.clone(), self.sort(e.ty()))),
            ExprKind::Binary(o, a, b) => self.binary(*o, a, b, &e.span),
            ExprKind::Chain(es, ops) => {
                let ts: Vec<Term> = es.iter().map(|x| self.expr(x)).collect();
                let mut parts = Vec::new();
                for (i, o) in ops.iter().enumerate() {
                    parts.push(rel(*o, ts[i].clone(), ts[i + 1].clone()));
                }
                and(parts)
            }
            ExprKind::Unary(UnOp::Not, a) => not(self.expr(a)),
            ExprKind::Unary(UnOp::Neg, a) => match self.expr(a) {
                Term::Int(n) => int(-n),
                t => op(Op::Neg, vec![t]),
            },
            ExprKind::FnCall(name, args) => self.fn_call(e, name, args),
            ExprKind::CtorCall(name, args) => {
                let args = args.iter().map(|a| self.expr(a)).collect();
                Term::app(
                    Fun::Ctor {
                        name: name.clone(),
                        dt: self.sort(e.ty()),
                    },
                    args,
                )
            }
            ExprKind::Index(a, i) => {
                let at = self.expr(a);
                let it = self.expr(i);
                match a.ty() {
                    Type::Seq(el) => {
                        let el = self.sort(el);
                        let len = Term::app(Fun::SeqLen(el.clone()), vec![at.clone()]);
                        self.check(
                            ObligationKind::IndexBounds,
                            &e.span,
                            and(vec![le(int(0), it.clone()), lt(it.clone(), len)]),
                            format!("index {} might be out of range", expr_to_string(i)),
                        );
                        Term::app(Fun::SeqAt(el), vec![at, it])
                    }
                    t => {
                        let el = self.sort(t.elem().unwrap_or(&Type::Int));
                        self.non_null(a, &at, &e.span);
                        let len = Term::app(Fun::Len, vec![at.clone()]);
                        self.check(
                            ObligationKind::IndexBounds,
                            &e.span,
                            and(vec![le(int(0), it.clone()), lt(it.clone(), len)]),
                            format!("index {} might be out of range", expr_to_string(i)),
                        );
                        let h = self.heap(&el);
                        select(select(h, at), it)
                    }
                }
            }
            ExprKind::Length(a) => {
                let at = self.expr(a);
                match a.ty() {
                    Type::Seq(el) => Term::app(Fun::SeqLen(self.sort(el)), vec![at]),
                    _ => {
                        self.non_null(a, &at, &e.span);
                        Term::app(Fun::Len, vec![at])
                    }
                }
            }
            ExprKind::Slice(a, lo, hi) => {
                let at = self.expr(a);
                let (len, el) = match a.ty() {
                    Type::Seq(el) => {
                        let el = self.sort(el);
                        (Term::app(Fun::SeqLen(el.clone()), vec![at.clone()]), el)
                    }
                    t => {
                        self.non_null(a, &at, &e.span);
                        (
                            Term::app(Fun::Len, vec![at.clone()]),
                            self.sort(t.elem().unwrap_or(&Type::Int)),
                        )
                    }
                };
                let lo_t = lo.as_ref().map(|x| self.expr(x)).unwrap_or(int(0));
                let hi_t = hi.as_ref().map(|x| self.expr(x)).unwrap_or_else(|| len.clone());
                if lo.is_some() || hi.is_some() {
                    self.check(
                        ObligationKind::IndexBounds,
                        &e.span,
                        and(vec![
                            le(int(0), lo_t.clone()),
                            le(lo_t.clone(), hi_t.clone()),
                            le(hi_t.clone(), len),
                        ]),
                        "slice bounds might be out of range".to_string(),
                    );
                }
                match a.ty() {
                    Type::Seq(_) => Term::app(Fun::SeqSub(el), vec![at, lo_t, hi_t]),
                    _ => {
                        let h = self.heap(&el);
                        Term::app(Fun::SeqOfRow(el), vec![select(h, at), lo_t, hi_t])
                    }
                }
            }
            ExprKind::MultisetOf(a) => {
                let at = self.expr(a);
                let el = self.sort(a.ty().elem().unwrap_or(&Type::Int));
                Term::app(Fun::MultisetOf(el), vec![at])
            }
            ExprKind::Old(a) => {
                let saved = self.in_old;
                self.in_old = true;
                let t = self.expr(a);
                self.in_old = saved;
                t
            }
            ExprKind::Forall(bvs, body) => {
                let vs: Vec<(String, Sort)> = bvs
                    .iter()
                    .map(|b| (b.name.clone(), self.sort(b.ty.as_ref().unwrap_or(&Type::Int))))
                    .collect();
                let saved: Vec<(String, Option<Term>)> = vs
                    .iter()
                    .map(|(n, s)| {
                        (
                            n.clone(),
                            self.vars.insert(n.clone(), Term::Bound(n.clone(), s.clone())),
                        )
                    })
                    .collect();
                self.frames.push(Frame::Bind(vs.clone()));
                let b = self.expr(body);
                self.frames.pop();
                for (n, old) in saved {
                    match old {
                        Some(t) => self.vars.insert(n, t),
                        None => self.vars.remove(&n),
                    };
                }
                forall(vs, Vec::new(), b)
            }
            ExprKind::Field(a, f) => {
                let at = self.expr(a);
                let dt_sort = self.sort(a.ty());
                let Type::Datatype(dn, _) = a.ty() else {
                    return Term::Bool(false);
                };
                let dt = self.tp.datatype(dn).expect("resolved datatype");
                if let Some(c) = f.strip_suffix('?') {
                    return Term::app(
                        Fun::IsCtor {
                            name: c.to_string(),
                            dt: dt_sort,
                        },
                        vec![at],
                    );
                }
                let ctor = dt
                    .ctors
                    .iter()
                    .find(|c| c.fields.iter().any(|p| &p.name == f))
                    .expect("resolved field");
                if dt.ctors.len() > 1 {
                    let is = Term::app(
                        Fun::IsCtor {
                            name: ctor.name.clone(),
                            dt: dt_sort.clone(),
                        },
                        vec![at.clone()],
                    );
                    self.check(
                        ObligationKind::FunctionPrecondition,
                        &e.span,
                        is,
                        format!("destructor {f} applies only to {} values", ctor.name),
                    );
                }
                Term::app(
                    Fun::Field {
                        ctor: ctor.name.clone(),
                        field: f.clone(),
                        dt: dt_sort,
                        result: self.sort(e.ty()),
                    },
                    vec![at],
                )
            }
            ExprKind::Ite(c, t, f) => {
                let ct = self.expr(c);
                let tt = self.guarded(ct.clone(), |s| s.expr(t));
                let ft = self.guarded(not(ct.clone()), |s| s.expr(f));
                ite(ct, tt, ft)
            }
        }
    }

    fn binary(&mut self, o: BinOp, a: &Expr, b: &Expr, span: &SourceSpan) -> Term {
        match o {
            BinOp::And => {
                let at = self.expr(a);
                let bt = self.guarded(at.clone(), |s| s.expr(b));
                and(vec![at, bt])
            }
            BinOp::Or => {
                let at = self.expr(a);
                let bt = self.guarded(not(at.clone()), |s| s.expr(b));
                or(vec![at, bt])
            }
            BinOp::Implies => {
                let at = self.expr(a);
                let bt = self.guarded(at.clone(), |s| s.expr(b));
                implies(at, bt)
            }
            BinOp::Explies => {
                let bt = self.expr(b);
                let at = self.guarded(bt.clone(), |s| s.expr(a));
                implies(bt, at)
            }
            BinOp::Div | BinOp::Mod => {
                let at = self.expr(a);
                let bt = self.expr(b);
                self.check(
                    ObligationKind::Division,
                    span,
                    not(eq(bt.clone(), int(0))),
                    format!("divisor {} might be zero", expr_to_string(b)),
                );
                op(if o == BinOp::Div { Op::Div } else { Op::Mod }, vec![at, bt])
            }
            _ => {
                let at = self.expr(a);
                let bt = self.expr(b);
                match o {
                    BinOp::Add => op(Op::Add, vec![at, bt]),
                    BinOp::Sub => op(Op::Sub, vec![at, bt]),
                    BinOp::Mul => op(Op::Mul, vec![at, bt]),
                    BinOp::Iff => eq(at, bt),
                    o => rel(o, at, bt),
                }
            }
        }
    }

    fn fn_call(&mut self, e: &Expr, name: &str, args: &[Expr]) -> Term {
        let tp = self.tp;
        let f = tp.function(name).expect("resolved function");
        let arg_terms: Vec<Term> = args.iter().map(|a| self.expr(a)).collect();
        let mut tm = HashMap::new();
        for (p, a) in f.params.iter().zip(args) {
            match_type(&p.ty, a.ty(), &mut tm);
        }
        match_type(&f.result, e.ty(), &mut tm);
        let inst: HashMap<String, Sort> = f
            .type_params
            .iter()
            .map(|tpn| {
                let t = tm.get(tpn).cloned().unwrap_or(Type::Int);
                (tpn.clone(), self.sort(&t))
            })
            .collect();
        let targs: Vec<Sort> = f.type_params.iter().map(|n| inst[n].clone()).collect();
        let heap_sorts = fn_heap_sorts(f, &inst);
        if self.checks.is_some() {
            let mut sub = self.callee(&f.params, arg_terms.clone(), inst.clone());
            for r in &f.requires {
                let g = sub.expr(r);
                self.check(
                    ObligationKind::FunctionPrecondition,
                    &e.span,
                    g,
                    format!(
                        "precondition {} of {name} might not hold",
                        expr_to_string(r)
                    ),
                );
            }
            if let Some(rec) = self.rec.clone() {
                if tp.same_scc(&rec.caller, name) {
                    let metric = termination::decl_metric(tp, name);
                    let mut sub = self.callee(&f.params, arg_terms.clone(), inst.clone());
                    let new: Vec<(Term, Sort)> = metric
                        .components
                        .iter()
                        .map(|c| (sub.expr(c), sub.sort(c.ty())))
                        .collect();
                    for (kind, goal) in termination::decrease_goals(&rec.metric, &new) {
                        self.check(
                            kind,
                            &e.span,
                            goal,
                            format!("call to {name} might not terminate"),
                        );
                    }
                }
            }
        }
        let mut all = Vec::with_capacity(heap_sorts.len() + arg_terms.len());
        for s in &heap_sorts {
            all.push(self.heap(s));
        }
        all.extend(arg_terms);
        Term::app(
            Fun::User {
                name: name.to_string(),
                targs,
                heaps: heap_sorts,
                result: sort_of(&f.result, &inst),
            },
            all,
        )
    }
}

pub fn rel(o: BinOp, a: Term, b: Term) -> Term {
    match o {
        BinOp::Eq | BinOp::Iff => eq(a, b),
        BinOp::Ne => not(eq(a, b)),
        BinOp::Lt => op(Op::Lt, vec![a, b]),
        BinOp::Le => op(Op::Le, vec![a, b]),
        BinOp::Gt => op(Op::Gt, vec![a, b]),
        BinOp::Ge => op(Op::Ge, vec![a, b]),
        BinOp::Implies => implies(a, b),
        BinOp::Explies => implies(b, a),
        BinOp::And => and(vec![a, b]),
        BinOp::Or => or(vec![a, b]),
        BinOp::Add => op(Op::Add, vec![a, b]),
        BinOp::Sub => op(Op::Sub, vec![a, b]),
        BinOp::Mul => op(Op::Mul, vec![a, b]),
        BinOp::Div => op(Op::Div, vec![a, b]),
        BinOp::Mod => op(Op::Mod, vec![a, b]),
    }
}
