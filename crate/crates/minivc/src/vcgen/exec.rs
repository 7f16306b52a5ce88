// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Forward symbolic execution of method bodies.

use super::calc::desugar_calc;
use super::expr::{heap_const, match_type, sort_of, RecCtx, Tr};
use super::term::*;
use super::{DeclVcs, Obligation};
use crate::diagnostics::{Diagnostic, FrontKind, ObligationKind};
use crate::resolve::TypedProgram;
use crate::span::SourceSpan;
use crate::syntax::ast::*;
use crate::syntax::pretty::expr_to_string;
use crate::termination;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug, Default)]
struct State {
    vars: BTreeMap<String, Term>,
    /// Current heap per element sort; absent means the entry heap.
    heaps: BTreeMap<Sort, Term>,
    hyps: Vec<Term>,
}

impl State {
    fn heap(&self, el: &Sort) -> Term {
        self.heaps.get(el).cloned().unwrap_or_else(|| heap_const(el))
    }
}

enum Target {
    Var(String),
    Elem(Sort, Term, Term),
}

type Shadow = Vec<(String, Option<Term>, Option<Sort>)>;

pub(super) struct Exec<'a> {
    tp: &'a TypedProgram,
    decl: String,
    sorts: HashMap<String, Sort>,
    old_heaps: BTreeMap<Sort, Term>,
    counters: HashMap<String, u32>,
    rec: Option<RecCtx>,
    /// References known to exist: array parameters and earlier allocations.
    refs: Vec<Term>,
    out: DeclVcs,
}

impl<'a> Exec<'a> {
    pub(super) fn new(tp: &'a TypedProgram, decl: &str) -> Self {
        Exec {
            tp,
            decl: decl.to_string(),
            sorts: HashMap::new(),
            old_heaps: BTreeMap::new(),
            counters: HashMap::new(),
            rec: None,
            refs: Vec::new(),
            out: DeclVcs {
                decl: decl.to_string(),
                ..DeclVcs::default()
            },
        }
    }

    pub(super) fn finish(self) -> DeclVcs {
        self.out
    }

    fn fresh(&mut self, base: &str, s: Sort) -> Term {
        let k = self.counters.entry(base.to_string()).or_insert(0);
        *k += 1;
        Term::Const(format!("{base}@{k}"), s)
    }

    fn sort(&self, t: &Type) -> Sort {
        sort_of(t, &HashMap::new())
    }

    fn tr(&self, st: &State) -> Tr<'a> {
        let mut tr = Tr::new(self.tp);
        tr.vars = st.vars.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        tr.heaps = st.heaps.clone();
        tr.old_heaps = self.old_heaps.clone();
        tr.rec = self.rec.clone();
        tr
    }

    /// A translator for a callee's clauses with parameters bound to `args`.
    fn callee_tr(&self, params: &[Param], args: &[Term], tsub: &HashMap<String, Sort>) -> Tr<'a> {
        let mut tr = Tr::new(self.tp);
        tr.vars = params
            .iter()
            .map(|p| p.name.clone())
            .zip(args.iter().cloned())
            .collect();
        tr.tsub = tsub.clone();
        tr
    }

    fn ob(&mut self, st: &State, kind: ObligationKind, span: &SourceSpan, label: String, goal: Term) {
        if goal == Term::Bool(true) {
            return;
        }
        self.out.obligations.push(Obligation {
            decl: self.decl.clone(),
            kind,
            span: span.clone(),
            label,
            hypotheses: st.hyps.clone(),
            goal,
        });
    }

    /// Translates `e`, emitting its well-formedness checks as obligations
    /// and assuming each one afterwards.
    fn eval(&mut self, st: &mut State, e: &Expr) -> Term {
        let mut tr = self.tr(st).with_checks();
        let t = tr.expr(e);
        for c in tr.take_checks() {
            self.ob(st, c.kind, &c.span, c.label, c.goal.clone());
            st.hyps.push(c.goal);
        }
        t
    }

    fn value(&self, st: &State, e: &Expr) -> Term {
        self.tr(st).expr(e)
    }

    fn declare(&mut self, st: &mut State, name: &str, s: Sort, v: Term) {
        if s == Sort::Ref {
            self.refs.push(v.clone());
        }
        self.sorts.insert(name.to_string(), s);
        st.vars.insert(name.to_string(), v);
    }

    fn recursion_ctx(&self, st: &State) -> Option<RecCtx> {
        let tp = self.tp;
        let name = &self.decl;
        let recursive = tp
            .sccs()
            .iter()
            .any(|c| c.contains(name) && (c.len() > 1 || tp.same_scc(name, name)));
        if !recursive {
            return None;
        }
        let m = termination::decl_metric(tp, name);
        let metric = m
            .components
            .iter()
            .map(|c| (self.value(st, c), self.sort(c.ty())))
            .collect();
        Some(RecCtx {
            caller: name.clone(),
            metric,
        })
    }

    pub(super) fn method(&mut self, m: &Method, body: &Block) {
        let mut st = State::default();
        for p in m.ins.iter().chain(&m.outs) {
            let s = self.sort(&p.ty);
            self.declare(&mut st, &p.name, s.clone(), Term::Const(p.name.clone(), s));
        }
        for r in &m.requires {
            let t = self.eval(&mut st, r);
            st.hyps.push(t);
        }
        self.rec = self.recursion_ctx(&st);
        self.block(&mut st, body);
        for e in &m.ensures {
            let g = self.eval(&mut st, e);
            let label = format!("postcondition {}", expr_to_string(e));
            self.ob(&st, ObligationKind::Postcondition, &e.span, label, g);
        }
    }

    pub(super) fn function(&mut self, f: &Function, body: &Expr) {
        let mut st = State::default();
        for p in &f.params {
            let s = self.sort(&p.ty);
            self.declare(&mut st, &p.name, s.clone(), Term::Const(p.name.clone(), s));
        }
        for r in &f.requires {
            let t = self.eval(&mut st, r);
            st.hyps.push(t);
        }
        self.rec = self.recursion_ctx(&st);
        self.eval(&mut st, body);
    }

    fn block(&mut self, st: &mut State, b: &[Stmt]) {
        let mut shadow = Shadow::new();
        for s in b {
            self.stmt(st, s, &mut shadow);
        }
        for (n, v, s) in shadow.into_iter().rev() {
            match v {
                Some(v) => st.vars.insert(n.clone(), v),
                None => st.vars.remove(&n),
            };
            match s {
                Some(s) => self.sorts.insert(n, s),
                None => self.sorts.remove(&n),
            };
        }
    }

    fn stmt(&mut self, st: &mut State, s: &Stmt, shadow: &mut Shadow) {
        match &s.kind {
            StmtKind::VarDecl { decls, rhs, .. } => {
                let vals: Vec<Term> = rhs.iter().map(|r| self.rhs(st, r)).collect();
                for (i, d) in decls.iter().enumerate() {
                    let sort = self.sort(d.ty.as_ref().unwrap_or(&Type::Int));
                    shadow.push((
                        d.name.clone(),
                        st.vars.get(&d.name).cloned(),
                        self.sorts.get(&d.name).cloned(),
                    ));
                    let v = match vals.get(i) {
                        Some(v) => v.clone(),
                        None => self.fresh(&d.name, sort.clone()),
                    };
                    self.declare(st, &d.name, sort, v);
                }
            }
            StmtKind::Assign { lhs, rhs } => {
                let targets: Vec<Target> = lhs.iter().map(|l| self.target(st, l)).collect();
                let vals: Vec<Term> = rhs.iter().map(|r| self.rhs(st, r)).collect();
                for (t, v) in targets.into_iter().zip(vals) {
                    self.assign(st, t, v);
                }
            }
            StmtKind::Call {
                targets,
                callee,
                args,
            } => self.call(st, &s.span, targets, callee, args),
            StmtKind::If { cond, then, els } => {
                let c = self.eval(st, cond);
                let mut a = st.clone();
                a.hyps.push(c.clone());
                self.block(&mut a, then);
                let mut b = st.clone();
                b.hyps.push(not(c.clone()));
                if let Some(e) = els {
                    self.block(&mut b, e);
                }
                *st = self.merge(st, vec![(c.clone(), a), (not(c), b)]);
            }
            StmtKind::While {
                guard,
                invariants,
                decreases,
                body,
            } => self.while_loop(st, s, guard, invariants, decreases, body),
            StmtKind::Assert(e) => {
                let g = self.eval(st, e);
                let label = format!("assertion {}", expr_to_string(e));
                self.ob(st, ObligationKind::Assertion, &e.span, label, g.clone());
                st.hyps.push(g);
            }
            StmtKind::Assume(e) => {
                let g = self.eval(st, e);
                st.hyps.push(g);
            }
            StmtKind::Calc { lines, ops, hints } => self.calc(st, &s.span, lines, ops, hints),
            StmtKind::Match { scrutinee, cases } => self.match_stmt(st, scrutinee, cases),
            StmtKind::Block(b) => self.block(st, b),
        }
    }

    fn rhs(&mut self, st: &mut State, r: &Rhs) -> Term {
        match r {
            Rhs::Expr(e) => self.eval(st, e),
            Rhs::ArrayAlloc { len, .. } => {
                let n = self.eval(st, len);
                self.ob(
                    st,
                    ObligationKind::IndexBounds,
                    &len.span,
                    format!("array size {} might be negative", expr_to_string(len)),
                    le(int(0), n.clone()),
                );
                st.hyps.push(le(int(0), n.clone()));
                let r = self.fresh("new", Sort::Ref);
                st.hyps.push(not(eq(r.clone(), Term::Null)));
                st.hyps.push(eq(Term::app(Fun::Len, vec![r.clone()]), n));
                for q in &self.refs {
                    st.hyps.push(not(eq(r.clone(), q.clone())));
                }
                self.refs.push(r.clone());
                r
            }
        }
    }

    /// Evaluates an assignment target before any value is assigned.
    fn target(&mut self, st: &mut State, l: &Expr) -> Target {
        match &l.kind {
            ExprKind::Index(a, i) => {
                self.eval(st, l);
                let el = self.sort(a.ty().elem().unwrap_or(&Type::Int));
                Target::Elem(el, self.value(st, a), self.value(st, i))
            }
            ExprKind::Var(n) => Target::Var(n.clone()),
            _ => unreachable!("resolver admits only variables and elements as targets"),
        }
    }

    fn assign(&mut self, st: &mut State, t: Target, v: Term) {
        match t {
            Target::Var(n) => {
                st.vars.insert(n, v);
            }
            Target::Elem(el, a, i) => {
                let h = st.heap(&el);
                let row = store(select(h.clone(), a.clone()), i, v);
                st.heaps.insert(el, store(h, a, row));
            }
        }
    }

    /// Joins branch states. Variables and heaps that differ between branches
    /// get a fresh constant tied to each branch's value under its guard.
    fn merge(&mut self, base: &State, branches: Vec<(Term, State)>) -> State {
        let n0 = base.hyps.len();
        let mut out = base.clone();
        let mut eqs: Vec<Vec<Term>> = vec![Vec::new(); branches.len()];
        for (name, v0) in &base.vars {
            let vals: Vec<Term> = branches
                .iter()
                .map(|(_, b)| b.vars.get(name).cloned().unwrap_or_else(|| v0.clone()))
                .collect();
            if vals.iter().all(|v| v == &vals[0]) {
                out.vars.insert(name.clone(), vals[0].clone());
                continue;
            }
            let sort = self.sorts.get(name).cloned().unwrap_or(Sort::Int);
            let phi = self.fresh(name, sort);
            for (i, v) in vals.into_iter().enumerate() {
                eqs[i].push(eq(phi.clone(), v));
            }
            out.vars.insert(name.clone(), phi);
        }
        let mut keys: BTreeSet<Sort> = base.heaps.keys().cloned().collect();
        for (_, b) in &branches {
            keys.extend(b.heaps.keys().cloned());
        }
        for el in keys {
            let vals: Vec<Term> = branches.iter().map(|(_, b)| b.heap(&el)).collect();
            if vals.iter().all(|v| v == &vals[0]) {
                out.heaps.insert(el, vals[0].clone());
                continue;
            }
            let name = format!("heap<{}>", el.mangle());
            let phi = self.fresh(&name, Sort::Heap(Box::new(el.clone())));
            for (i, v) in vals.into_iter().enumerate() {
                eqs[i].push(eq(phi.clone(), v));
            }
            out.heaps.insert(el, phi);
        }
        let mut arms = Vec::new();
        for ((g, b), e) in branches.into_iter().zip(eqs) {
            let mut local: Vec<Term> = b.hyps[n0..].to_vec();
            if local.first() == Some(&g) {
                local.remove(0);
            }
            local.extend(e);
            arms.push(implies(g, and(local)));
        }
        let h = and(arms);
        if h != Term::Bool(true) {
            out.hyps.push(h);
        }
        out
    }

    /// Replaces each element-sort heap in `els` by a fresh heap that agrees
    /// with the old one outside the listed references. `None` means the
    /// modified references are unknown and nothing is preserved.
    fn havoc_heaps(&mut self, st: &mut State, els: BTreeMap<Sort, Option<Vec<Term>>>) {
        for (el, refs) in els {
            let h = st.heap(&el);
            let name = format!("heap<{}>", el.mangle());
            let h2 = self.fresh(&name, Sort::Heap(Box::new(el.clone())));
            if let Some(refs) = refs {
                let r = Term::Bound("r".into(), Sort::Ref);
                let outside = and(refs.into_iter().map(|q| not(eq(r.clone(), q))).collect());
                let frame = forall(
                    vec![("r".into(), Sort::Ref)],
                    vec![vec![select(h2.clone(), r.clone())]],
                    implies(outside, eq(select(h2.clone(), r.clone()), select(h, r))),
                );
                st.hyps.push(frame);
            }
            st.heaps.insert(el, h2);
        }
    }

    /// Element sorts and references a callee may modify, with its
    /// parameters bound to `args`.
    fn callee_footprint(
        &self,
        m: &Method,
        args: &[Term],
        tsub: &HashMap<String, Sort>,
    ) -> BTreeMap<Sort, Option<Vec<Term>>> {
        let mut out: BTreeMap<Sort, Option<Vec<Term>>> = BTreeMap::new();
        let mut tr = self.callee_tr(&m.ins, args, tsub);
        for e in &m.modifies {
            let Some(el) = e.ty().elem() else { continue };
            let el = sort_of(el, tsub);
            let r = tr.expr(e);
            if let Some(v) = out.entry(el).or_insert_with(|| Some(Vec::new())) {
                v.push(r);
            }
        }
        out
    }

    fn call(
        &mut self,
        st: &mut State,
        span: &SourceSpan,
        targets: &[Expr],
        callee: &str,
        args: &[Expr],
    ) {
        let tp = self.tp;
        let m = tp.method(callee).expect("resolved method");
        let arg_terms: Vec<Term> = args.iter().map(|a| self.eval(st, a)).collect();
        let lhs: Vec<Target> = targets.iter().map(|t| self.target(st, t)).collect();
        let mut tm = HashMap::new();
        for (p, a) in m.ins.iter().zip(args) {
            match_type(&p.ty, a.ty(), &mut tm);
        }
        for (p, t) in m.outs.iter().zip(targets) {
            match_type(&p.ty, t.ty(), &mut tm);
        }
        let tsub: HashMap<String, Sort> = m
            .type_params
            .iter()
            .map(|n| (n.clone(), self.sort(tm.get(n).unwrap_or(&Type::Int))))
            .collect();

        let mut pre = self.callee_tr(&m.ins, &arg_terms, &tsub);
        pre.heaps = st.heaps.clone();
        pre.old_heaps = st.heaps.clone();
        for r in &m.requires {
            let g = pre.expr(r);
            let label = format!("precondition {} of {callee}", expr_to_string(r));
            self.ob(st, ObligationKind::PreconditionAtCall, span, label, g);
        }
        if let Some(rec) = self.rec.clone() {
            if tp.same_scc(&self.decl, callee) {
                let metric = termination::decl_metric(tp, callee);
                let new: Vec<(Term, Sort)> = metric
                    .components
                    .iter()
                    .map(|c| (pre.expr(c), pre.sort(c.ty())))
                    .collect();
                for (kind, goal) in termination::decrease_goals(&rec.metric, &new) {
                    let label = format!("call to {callee} decreases {}", metric.to_text());
                    self.ob(st, kind, span, label, goal);
                }
            }
        }

        let pre_heaps = st.heaps.clone();
        if !m.is_lemma {
            let fp = self.callee_footprint(m, &arg_terms, &tsub);
            self.havoc_heaps(st, fp);
        }
        let mut outs = Vec::new();
        for p in &m.outs {
            let s = sort_of(&p.ty, &tsub);
            outs.push(self.fresh(&p.name, s));
        }
        let mut post = self.callee_tr(&m.ins, &arg_terms, &tsub);
        for (p, v) in m.outs.iter().zip(&outs) {
            post.vars.insert(p.name.clone(), v.clone());
        }
        post.heaps = st.heaps.clone();
        post.old_heaps = pre_heaps;
        for e in &m.ensures {
            st.hyps.push(post.expr(e));
        }
        for (t, v) in lhs.into_iter().zip(outs) {
            self.assign(st, t, v);
        }
    }

    fn while_loop(
        &mut self,
        st: &mut State,
        s: &Stmt,
        guard: &Expr,
        invariants: &[Expr],
        decreases: &Option<Vec<Expr>>,
        body: &Block,
    ) {
        for inv in invariants {
            let g = self.value(st, inv);
            let label = format!("loop invariant {}", expr_to_string(inv));
            self.ob(st, ObligationKind::InvariantEntry, &inv.span, label, g);
        }

        // Havoc what the body may change.
        let mut assigned = BTreeSet::new();
        let mut elem_writes: Vec<&Expr> = Vec::new();
        let mut calls: Vec<(&Method, &[Expr])> = Vec::new();
        for x in body {
            x.walk(&mut |x| match &x.kind {
                StmtKind::Assign { lhs, .. } => {
                    for l in lhs {
                        match &l.kind {
                            ExprKind::Var(n) => {
                                assigned.insert(n.clone());
                            }
                            ExprKind::Index(a, _) => elem_writes.push(a),
                            _ => {}
                        }
                    }
                }
                StmtKind::Call {
                    targets,
                    callee,
                    args,
                } => {
                    for t in targets {
                        match &t.kind {
                            ExprKind::Var(n) => {
                                assigned.insert(n.clone());
                            }
                            ExprKind::Index(a, _) => elem_writes.push(a),
                            _ => {}
                        }
                    }
                    if let Some(m) = self.tp.method(callee) {
                        if !m.is_lemma && !m.modifies.is_empty() {
                            calls.push((m, args));
                        }
                    }
                }
                _ => {}
            });
        }
        let assigned: Vec<String> = assigned
            .into_iter()
            .filter(|n| st.vars.contains_key(n))
            .collect();
        // A reference expression names a fixed array only if nothing it
        // mentions changes in the loop.
        let fixed = |e: &Expr| {
            e.free_vars()
                .iter()
                .all(|v| st.vars.contains_key(v) && !assigned.contains(v))
        };
        let mut writes: Vec<(Sort, Option<Term>)> = Vec::new();
        for a in elem_writes {
            let el = self.sort(a.ty().elem().unwrap_or(&Type::Int));
            writes.push((el, fixed(a).then(|| self.value(st, a))));
        }
        for (m, args) in calls {
            let known = args.iter().all(fixed);
            let arg_terms: Vec<Term> = args.iter().map(|a| self.value(st, a)).collect();
            let mut tm = HashMap::new();
            for (p, a) in m.ins.iter().zip(args) {
                match_type(&p.ty, a.ty(), &mut tm);
            }
            let tsub: HashMap<String, Sort> = m
                .type_params
                .iter()
                .map(|n| (n.clone(), self.sort(tm.get(n).unwrap_or(&Type::Int))))
                .collect();
            for (el, refs) in self.callee_footprint(m, &arg_terms, &tsub) {
                for r in refs.unwrap_or_default() {
                    writes.push((el.clone(), known.then_some(r)));
                }
            }
        }
        let mut footprint: BTreeMap<Sort, Option<Vec<Term>>> = BTreeMap::new();
        for (el, r) in writes {
            let slot = footprint.entry(el).or_insert_with(|| Some(Vec::new()));
            match (slot.as_mut(), r) {
                (Some(v), Some(r)) => {
                    if !v.contains(&r) {
                        v.push(r)
                    }
                }
                _ => *slot = None,
            }
        }
        for n in &assigned {
            let sort = self.sorts.get(n).cloned().unwrap_or(Sort::Int);
            let v = self.fresh(n, sort);
            st.vars.insert(n.clone(), v);
        }
        self.havoc_heaps(st, footprint);

        for inv in invariants {
            let g = self.eval(st, inv);
            st.hyps.push(g);
        }
        let g = self.eval(st, guard);
        let mut body_st = st.clone();
        body_st.hyps.push(g.clone());
        let metric = termination::loop_metric(decreases, guard);
        let old_metric: Option<Vec<(Term, Sort)>> = metric.as_ref().map(|m| {
            m.components
                .iter()
                .map(|c| (self.eval(&mut body_st, c), self.sort(c.ty())))
                .collect()
        });
        if metric.is_none() {
            self.out.diagnostics.push(Diagnostic::error(
                s.span.clone(),
                FrontKind::TerminationMetricRequired,
                "cannot guess a decreases clause for this loop; write one",
            ));
        }
        self.block(&mut body_st, body);
        for inv in invariants {
            let g2 = self.value(&body_st, inv);
            let label = format!("loop invariant {}", expr_to_string(inv));
            self.ob(&body_st, ObligationKind::InvariantMaintenance, &inv.span, label, g2);
        }
        if let (Some(m), Some(old)) = (metric, old_metric) {
            let new: Vec<(Term, Sort)> = m
                .components
                .iter()
                .map(|c| (self.value(&body_st, c), self.sort(c.ty())))
                .collect();
            for (kind, goal) in termination::decrease_goals(&old, &new) {
                let label = format!("loop decreases {}", m.to_text());
                self.ob(&body_st, kind, &s.span, label, goal);
            }
        }
        st.hyps.push(not(g));
    }

    fn calc(
        &mut self,
        st: &mut State,
        span: &SourceSpan,
        lines: &[Expr],
        ops: &[CalcOp],
        hints: &[Block],
    ) {
        for l in lines {
            self.eval(st, l);
        }
        for step in desugar_calc(lines, ops, hints, span) {
            match &step.kind {
                StmtKind::Block(b) => {
                    let saved = st.clone();
                    let saved_sorts = self.sorts.clone();
                    let (last, init) = b.split_last().expect("step ends in its assertion");
                    self.block(st, init);
                    if let StmtKind::Assert(e) = &last.kind {
                        let g = self.value(st, e);
                        let label = format!("calc step {}", expr_to_string(e));
                        self.ob(st, ObligationKind::CalcStep, &e.span, label, g);
                    }
                    *st = saved;
                    self.sorts = saved_sorts;
                }
                StmtKind::Assume(e) => {
                    let g = self.value(st, e);
                    st.hyps.push(g);
                }
                _ => unreachable!("desugared calc has only steps and the final assumption"),
            }
        }
    }

    fn match_stmt(&mut self, st: &mut State, scrutinee: &Expr, cases: &[MatchCase]) {
        let t = self.eval(st, scrutinee);
        let dt_sort = self.sort(scrutinee.ty());
        let Type::Datatype(dn, _) = scrutinee.ty() else {
            return;
        };
        let dt = self.tp.datatype(dn).expect("resolved datatype");
        let mut branches = Vec::new();
        for c in cases {
            let g = if dt.ctors.len() > 1 {
                Term::app(
                    Fun::IsCtor {
                        name: c.ctor.clone(),
                        dt: dt_sort.clone(),
                    },
                    vec![t.clone()],
                )
            } else {
                Term::Bool(true)
            };
            let ctor = dt.ctors.iter().find(|k| k.name == c.ctor).expect("resolved ctor");
            let mut b = st.clone();
            b.hyps.push(g.clone());
            let mut shadow = Shadow::new();
            for (bv, f) in c.binders.iter().zip(&ctor.fields) {
                let s = self.sort(bv.ty.as_ref().unwrap_or(&Type::Int));
                let v = Term::app(
                    Fun::Field {
                        ctor: ctor.name.clone(),
                        field: f.name.clone(),
                        dt: dt_sort.clone(),
                        result: s.clone(),
                    },
                    vec![t.clone()],
                );
                shadow.push((bv.name.clone(), b.vars.get(&bv.name).cloned(), self.sorts.get(&bv.name).cloned()));
                self.declare(&mut b, &bv.name, s, v);
            }
            self.block(&mut b, &c.body);
            for (n, v, s) in shadow.into_iter().rev() {
                match v {
                    Some(v) => b.vars.insert(n.clone(), v),
                    None => b.vars.remove(&n),
                };
                match s {
                    Some(s) => self.sorts.insert(n, s),
                    None => self.sorts.remove(&n),
                };
            }
            branches.push((g, b));
        }
        if !branches.is_empty() {
            *st = self.merge(st, branches);
        }
    }
}
