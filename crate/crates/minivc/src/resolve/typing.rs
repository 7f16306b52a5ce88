// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Name binding and type inference.
//!
//! Type arguments of generic constructors and functions are inferred by
//! first-order unification; quantified variables without an annotation get a
//! fresh inference variable. Each declaration is checked independently and
//! zonked at the end, defaulting unconstrained variables to `int`.

use crate::diagnostics::{Diagnostic, FrontKind};
use crate::span::SourceSpan;
use crate::syntax::ast::*;
use std::collections::{BTreeSet, HashMap};

pub(super) fn check_program(p: &Program) -> Result<Program, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let sigs = resolve_signatures(p, &mut diags);
    if !diags.is_empty() {
        return Err(diags);
    }
    let globals = Globals::new(&sigs);
    let mut out = Vec::with_capacity(sigs.decls.len());
    for d in &sigs.decls {
        let mut cx = Cx::new(&globals);
        let d = match d {
            Decl::Method(m) => Decl::Method(cx.method(m)),
            Decl::Function(f) => Decl::Function(cx.function(f)),
            Decl::Datatype(dt) => Decl::Datatype(dt.clone()),
        };
        diags.append(&mut cx.diags);
        out.push(d);
    }
    if diags.is_empty() {
        Ok(Program { decls: out })
    } else {
        Err(diags)
    }
}

fn err(span: &SourceSpan, kind: FrontKind, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(span.clone(), kind, msg)
}

/// Rewrites parser-level named types in every signature, and reports
/// duplicate names.
fn resolve_signatures(p: &Program, diags: &mut Vec<Diagnostic>) -> Program {
    let mut arity: HashMap<&str, usize> = HashMap::new();
    let mut seen: HashMap<&str, ()> = HashMap::new();
    for d in &p.decls {
        if seen.insert(d.name(), ()).is_some() {
            diags.push(err(
                d.span(),
                FrontKind::DuplicateName,
                format!("duplicate declaration of {}", d.name()),
            ));
        }
        if let Decl::Datatype(dt) = d {
            arity.insert(&dt.name, dt.type_params.len());
            for c in &dt.ctors {
                if seen.insert(&c.name, ()).is_some() {
                    diags.push(err(
                        &c.span,
                        FrontKind::DuplicateName,
                        format!("duplicate declaration of {}", c.name),
                    ));
                }
            }
        }
    }
    let rt = |t: &Type, tps: &[String], span: &SourceSpan, diags: &mut Vec<Diagnostic>| {
        match resolve_type(t, tps, &arity) {
            Ok(t) => t,
            Err(msg) => {
                diags.push(err(span, FrontKind::UnresolvedName, msg));
                Type::Int
            }
        }
    };
    let params = |ps: &[Param], tps: &[String], diags: &mut Vec<Diagnostic>| {
        let mut names = BTreeSet::new();
        ps.iter()
            .map(|p| {
                if !names.insert(p.name.clone()) {
                    diags.push(err(
                        &p.span,
                        FrontKind::DuplicateName,
                        format!("duplicate parameter {}", p.name),
                    ));
                }
                Param {
                    ty: rt(&p.ty, tps, &p.span, diags),
                    ..p.clone()
                }
            })
            .collect::<Vec<_>>()
    };
    let decls = p
        .decls
        .iter()
        .map(|d| match d {
            Decl::Method(m) => {
                let mut m = m.clone();
                let mut all = m.ins.clone();
                all.extend(m.outs.iter().cloned());
                let all = params(&all, &m.type_params, diags);
                m.outs = all[m.ins.len()..].to_vec();
                m.ins = all[..m.ins.len()].to_vec();
                Decl::Method(m)
            }
            Decl::Function(f) => {
                let mut f = f.clone();
                f.params = params(&f.params, &f.type_params, diags);
                let span = f.span.clone();
                f.result = rt(&f.result, &f.type_params, &span, diags);
                Decl::Function(f)
            }
            Decl::Datatype(dt) => {
                let mut dt = dt.clone();
                for c in &mut dt.ctors {
                    c.fields = params(&c.fields, &dt.type_params, diags);
                }
                Decl::Datatype(dt)
            }
        })
        .collect();
    Program { decls }
}

fn resolve_type(t: &Type, tps: &[String], arity: &HashMap<&str, usize>) -> Result<Type, String> {
    Ok(match t {
        Type::Named(n, args) => {
            if tps.contains(n) && args.is_empty() {
                Type::TypeVar(n.clone())
            } else if let Some(&k) = arity.get(n.as_str()) {
                if k != args.len() {
                    return Err(format!("{n} expects {k} type arguments"));
                }
                Type::Datatype(
                    n.clone(),
                    args.iter()
                        .map(|a| resolve_type(a, tps, arity))
                        .collect::<Result<_, _>>()?,
                )
            } else {
                return Err(format!("unknown type {n}"));
            }
        }
        Type::Array(e) => Type::Array(Box::new(resolve_type(e, tps, arity)?)),
        Type::Seq(e) => Type::Seq(Box::new(resolve_type(e, tps, arity)?)),
        Type::Multiset(e) => Type::Multiset(Box::new(resolve_type(e, tps, arity)?)),
        Type::Datatype(n, args) => Type::Datatype(
            n.clone(),
            args.iter()
                .map(|a| resolve_type(a, tps, arity))
                .collect::<Result<_, _>>()?,
        ),
        other => other.clone(),
    })
}

/// Substitutes declaration type parameters.
pub(crate) fn subst(t: &Type, m: &HashMap<String, Type>) -> Type {
    match t {
        Type::TypeVar(n) => m.get(n).cloned().unwrap_or_else(|| t.clone()),
        Type::Array(e) => Type::Array(Box::new(subst(e, m))),
        Type::Seq(e) => Type::Seq(Box::new(subst(e, m))),
        Type::Multiset(e) => Type::Multiset(Box::new(subst(e, m))),
        Type::Datatype(n, a) => Type::Datatype(n.clone(), a.iter().map(|x| subst(x, m)).collect()),
        _ => t.clone(),
    }
}

struct Globals<'a> {
    datatypes: HashMap<&'a str, &'a Datatype>,
    ctors: HashMap<&'a str, (&'a Datatype, &'a Constructor)>,
    functions: HashMap<&'a str, &'a Function>,
    methods: HashMap<&'a str, &'a Method>,
}

impl<'a> Globals<'a> {
    fn new(p: &'a Program) -> Self {
        let mut g = Globals {
            datatypes: HashMap::new(),
            ctors: HashMap::new(),
            functions: HashMap::new(),
            methods: HashMap::new(),
        };
        for d in &p.decls {
            match d {
                Decl::Datatype(dt) => {
                    g.datatypes.insert(&dt.name, dt);
                    for c in &dt.ctors {
                        g.ctors.insert(&c.name, (dt, c));
                    }
                }
                Decl::Function(f) => {
                    g.functions.insert(&f.name, f);
                }
                Decl::Method(m) => {
                    g.methods.insert(&m.name, m);
                }
            }
        }
        g
    }
}

#[derive(Clone)]
struct Local {
    ty: Type,
    mutable: bool,
}

struct Cx<'g> {
    g: &'g Globals<'g>,
    scopes: Vec<HashMap<String, Local>>,
    subst: Vec<Option<Type>>,
    two_state: bool,
    tparams: Vec<String>,
    diags: Vec<Diagnostic>,
}

impl<'g> Cx<'g> {
    fn new(g: &'g Globals<'g>) -> Self {
        Cx {
            g,
            scopes: vec![HashMap::new()],
            subst: Vec::new(),
            two_state: false,
            tparams: Vec::new(),
            diags: Vec::new(),
        }
    }

    // ---- inference ----

    fn fresh(&mut self) -> Type {
        self.subst.push(None);
        Type::Infer(self.subst.len() as u32 - 1)
    }

    fn shallow(&self, t: &Type) -> Type {
        let mut t = t.clone();
        while let Type::Infer(i) = t {
            match &self.subst[i as usize] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn zonk(&self, t: &Type) -> Type {
        match self.shallow(t) {
            Type::Infer(_) => Type::Int,
            Type::Array(e) => Type::Array(Box::new(self.zonk(&e))),
            Type::Seq(e) => Type::Seq(Box::new(self.zonk(&e))),
            Type::Multiset(e) => Type::Multiset(Box::new(self.zonk(&e))),
            Type::Datatype(n, a) => Type::Datatype(n, a.iter().map(|x| self.zonk(x)).collect()),
            other => other,
        }
    }

    fn occurs(&self, v: u32, t: &Type) -> bool {
        match self.shallow(t) {
            Type::Infer(i) => i == v,
            Type::Array(e) | Type::Seq(e) | Type::Multiset(e) => self.occurs(v, &e),
            Type::Datatype(_, a) => a.iter().any(|x| self.occurs(v, x)),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Type, b: &Type) -> bool {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Type::Infer(i), Type::Infer(j)) if i == j => true,
            (Type::Infer(i), t) | (t, Type::Infer(i)) => {
                if self.occurs(*i, t) {
                    return false;
                }
                self.subst[*i as usize] = Some(t.clone());
                true
            }
            (Type::Null, Type::Array(_)) | (Type::Array(_), Type::Null) => true,
            (Type::Array(x), Type::Array(y))
            | (Type::Seq(x), Type::Seq(y))
            | (Type::Multiset(x), Type::Multiset(y)) => self.unify(x, y),
            (Type::Datatype(n, xs), Type::Datatype(m, ys)) => {
                n == m
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => a == b,
        }
    }

    fn expect(&mut self, span: &SourceSpan, want: &Type, got: &Type) {
        if !self.unify(want, got) {
            let (w, g) = (self.zonk(want), self.zonk(got));
            self.diags.push(err(
                span,
                FrontKind::TypeMismatch,
                format!("expected {w}, found {g}"),
            ));
        }
    }

    // ---- scopes ----

    fn lookup(&self, name: &str) -> Option<&Local> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare(&mut self, name: &str, ty: Type, mutable: bool, span: &SourceSpan) {
        let scope = self.scopes.last_mut().expect("scope");
        if scope.contains_key(name) {
            self.diags.push(err(
                span,
                FrontKind::DuplicateName,
                format!("{name} is already declared in this scope"),
            ));
        }
        scope.insert(name.to_string(), Local { ty, mutable });
    }

    fn scoped<T>(&mut self, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scopes.push(HashMap::new());
        let r = f(self);
        self.scopes.pop();
        r
    }

    fn instantiate(&mut self, tps: &[String]) -> HashMap<String, Type> {
        tps.iter().map(|n| (n.clone(), self.fresh())).collect()
    }

    // ---- declarations ----

    fn method(&mut self, m: &Method) -> Method {
        let mut m = m.clone();
        self.tparams = m.type_params.clone();
        for p in &m.ins {
            self.declare(&p.name, p.ty.clone(), false, &p.span);
        }
        for e in &mut m.requires {
            self.bool_expr(e);
        }
        for e in &mut m.modifies {
            let t = self.expr(e);
            if !matches!(self.shallow(&t), Type::Array(_)) {
                self.diags.push(err(
                    &e.span,
                    FrontKind::TypeMismatch,
                    "modifies clause expects an array",
                ));
            }
        }
        for e in m.decreases.iter_mut().flatten() {
            self.expr(e);
        }
        for p in &m.outs {
            self.declare(&p.name, p.ty.clone(), true, &p.span);
        }
        self.two_state = true;
        for e in &mut m.ensures {
            self.bool_expr(e);
        }
        if let Some(body) = &mut m.body {
            *body = self.scoped(|cx| cx.block(body));
        }
        self.two_state = false;
        self.finish_method(&mut m);
        if let Some(body) = &m.body {
            let mut assigned = BTreeSet::new();
            definitely_assigned(body, &mut assigned);
            for p in &m.outs {
                if !assigned.contains(&p.name) {
                    self.diags.push(err(
                        &p.span,
                        FrontKind::DefiniteAssignment,
                        format!("out-parameter {} might not be assigned on every path", p.name),
                    ));
                }
            }
        }
        m
    }

    fn function(&mut self, f: &Function) -> Function {
        let mut f = f.clone();
        self.tparams = f.type_params.clone();
        for p in &f.params {
            self.declare(&p.name, p.ty.clone(), false, &p.span);
        }
        for e in &mut f.requires {
            self.bool_expr(e);
        }
        for e in &mut f.reads {
            let t = self.expr(e);
            if !matches!(self.shallow(&t), Type::Array(_)) {
                self.diags.push(err(
                    &e.span,
                    FrontKind::TypeMismatch,
                    "reads clause expects an array",
                ));
            }
        }
        for e in f.decreases.iter_mut().flatten() {
            self.expr(e);
        }
        if let Some(b) = &mut f.body {
            let t = self.expr(b);
            let r = f.result.clone();
            self.expect(&b.span, &r, &t);
        }
        let z = |cx: &Self, e: &mut Expr| cx.zonk_expr(e);
        for e in f
            .requires
            .iter_mut()
            .chain(f.reads.iter_mut())
            .chain(f.decreases.iter_mut().flatten())
            .chain(f.body.iter_mut())
        {
            z(self, e);
        }
        f
    }

    fn finish_method(&self, m: &mut Method) {
        for e in m
            .requires
            .iter_mut()
            .chain(m.ensures.iter_mut())
            .chain(m.modifies.iter_mut())
            .chain(m.decreases.iter_mut().flatten())
        {
            self.zonk_expr(e);
        }
        if let Some(b) = &mut m.body {
            for s in b {
                self.zonk_stmt(s);
            }
        }
    }

    fn zonk_expr(&self, e: &mut Expr) {
        if let Some(t) = &e.ty {
            e.ty = Some(self.zonk(t));
        }
        if let ExprKind::Forall(bvs, _) = &mut e.kind {
            for b in bvs {
                b.ty = b.ty.as_ref().map(|t| self.zonk(t));
            }
        }
        e.for_each_child_mut(&mut |c| self.zonk_expr(c));
    }

    fn zonk_stmt(&self, s: &mut Stmt) {
        let zb = |cx: &Self, b: &mut Block| b.iter_mut().for_each(|s| cx.zonk_stmt(s));
        match &mut s.kind {
            StmtKind::VarDecl { decls, rhs, .. } => {
                for d in decls {
                    d.ty = d.ty.as_ref().map(|t| self.zonk(t));
                }
                self.zonk_rhs(rhs);
            }
            StmtKind::Assign { lhs, rhs } => {
                lhs.iter_mut().for_each(|e| self.zonk_expr(e));
                self.zonk_rhs(rhs);
            }
            StmtKind::Call { targets, args, .. } => {
                targets
                    .iter_mut()
                    .chain(args.iter_mut())
                    .for_each(|e| self.zonk_expr(e));
            }
            StmtKind::If { cond, then, els } => {
                self.zonk_expr(cond);
                zb(self, then);
                if let Some(e) = els {
                    zb(self, e);
                }
            }
            StmtKind::While {
                guard,
                invariants,
                decreases,
                body,
            } => {
                self.zonk_expr(guard);
                invariants.iter_mut().for_each(|e| self.zonk_expr(e));
                decreases
                    .iter_mut()
                    .flatten()
                    .for_each(|e| self.zonk_expr(e));
                zb(self, body);
            }
            StmtKind::Assert(e) | StmtKind::Assume(e) => self.zonk_expr(e),
            StmtKind::Calc { lines, hints, .. } => {
                lines.iter_mut().for_each(|e| self.zonk_expr(e));
                hints.iter_mut().for_each(|h| zb(self, h));
            }
            StmtKind::Match { scrutinee, cases } => {
                self.zonk_expr(scrutinee);
                for c in cases {
                    for b in &mut c.binders {
                        b.ty = b.ty.as_ref().map(|t| self.zonk(t));
                    }
                    zb(self, &mut c.body);
                }
            }
            StmtKind::Block(b) => zb(self, b),
        }
    }

    fn zonk_rhs(&self, rhs: &mut [Rhs]) {
        for r in rhs {
            match r {
                Rhs::Expr(e) => self.zonk_expr(e),
                Rhs::ArrayAlloc { len, .. } => self.zonk_expr(len),
            }
        }
    }

    // ---- statements ----

    fn block(&mut self, b: &Block) -> Block {
        let mut out = Vec::with_capacity(b.len());
        for s in b {
            self.stmt(s, &mut out);
        }
        out
    }

    /// A method call on the right of `:=`, if that is what `rhs` is.
    fn method_call_rhs(&self, rhs: &[Rhs]) -> Option<(String, Vec<Expr>)> {
        match rhs {
            [Rhs::Expr(Expr {
                kind: ExprKind::FnCall(name, args),
                ..
            })] if self.g.methods.contains_key(name.as_str()) && self.lookup(name).is_none() => {
                Some((name.clone(), args.clone()))
            }
            _ => None,
        }
    }

    fn stmt(&mut self, s: &Stmt, out: &mut Block) {
        let span = s.span.clone();
        let kind = match &s.kind {
            StmtKind::VarDecl { decls, ghost, rhs } => {
                if let Some((callee, args)) = self.method_call_rhs(rhs) {
                    let mut decls = decls.clone();
                    let mut targets = Vec::new();
                    for d in &mut decls {
                        let t = match &d.ty {
                            Some(t) => self.user_type(t, &d.span),
                            None => self.fresh(),
                        };
                        d.ty = Some(t.clone());
                        self.declare(&d.name, t.clone(), true, &d.span);
                        targets.push(Expr::typed(ExprKind::Var(d.name.clone()), d.span.clone(), t));
                    }
                    out.push(Stmt {
                        kind: StmtKind::VarDecl {
                            decls,
                            ghost: *ghost,
                            rhs: Vec::new(),
                        },
                        span: span.clone(),
                    });
                    let call = self.call(&span, targets, &callee, args);
                    out.push(Stmt { kind: call, span });
                    return;
                }
                if !rhs.is_empty() && rhs.len() != decls.len() {
                    self.diags.push(err(
                        &span,
                        FrontKind::ArityMismatch,
                        format!("{} variables but {} values", decls.len(), rhs.len()),
                    ));
                }
                let rhs: Vec<Rhs> = rhs.iter().map(|r| self.rhs(r)).collect();
                let mut decls = decls.clone();
                for (i, d) in decls.iter_mut().enumerate() {
                    let t = match &d.ty {
                        Some(t) => self.user_type(t, &d.span),
                        None => self.fresh(),
                    };
                    if let Some(r) = rhs.get(i) {
                        let (rt, rs) = rhs_type(r);
                        self.expect(rs, &t, &rt);
                    }
                    d.ty = Some(t.clone());
                    self.declare(&d.name, t, true, &d.span);
                }
                StmtKind::VarDecl {
                    decls,
                    ghost: *ghost,
                    rhs,
                }
            }
            StmtKind::Assign { lhs, rhs } => {
                if let Some((callee, args)) = self.method_call_rhs(rhs) {
                    let targets = lhs.iter().map(|e| self.lvalue(e)).collect();
                    self.call(&span, targets, &callee, args)
                } else {
                    if lhs.len() != rhs.len() {
                        self.diags.push(err(
                            &span,
                            FrontKind::ArityMismatch,
                            format!("{} targets but {} values", lhs.len(), rhs.len()),
                        ));
                    }
                    let lhs: Vec<Expr> = lhs.iter().map(|e| self.lvalue(e)).collect();
                    let rhs: Vec<Rhs> = rhs.iter().map(|r| self.rhs(r)).collect();
                    for (l, r) in lhs.iter().zip(&rhs) {
                        let (rt, rs) = rhs_type(r);
                        self.expect(rs, l.ty(), &rt);
                    }
                    StmtKind::Assign { lhs, rhs }
                }
            }
            StmtKind::Call {
                targets,
                callee,
                args,
            } => {
                let targets = targets.iter().map(|e| self.lvalue(e)).collect();
                self.call(&span, targets, callee, args.clone())
            }
            StmtKind::If { cond, then, els } => {
                let mut cond = cond.clone();
                self.bool_expr(&mut cond);
                let then = self.scoped(|cx| cx.block(then));
                let els = els.as_ref().map(|b| self.scoped(|cx| cx.block(b)));
                StmtKind::If { cond, then, els }
            }
            StmtKind::While {
                guard,
                invariants,
                decreases,
                body,
            } => {
                let mut guard = guard.clone();
                self.bool_expr(&mut guard);
                let mut invariants = invariants.clone();
                invariants.iter_mut().for_each(|e| self.bool_expr(e));
                let mut decreases = decreases.clone();
                for e in decreases.iter_mut().flatten() {
                    self.expr(e);
                }
                let body = self.scoped(|cx| cx.block(body));
                StmtKind::While {
                    guard,
                    invariants,
                    decreases,
                    body,
                }
            }
            StmtKind::Assert(e) => {
                let mut e = e.clone();
                self.bool_expr(&mut e);
                StmtKind::Assert(e)
            }
            StmtKind::Assume(e) => {
                let mut e = e.clone();
                self.bool_expr(&mut e);
                StmtKind::Assume(e)
            }
            StmtKind::Calc { lines, ops, hints } => {
                self.check_calc_ops(&span, ops);
                let logical = ops
                    .iter()
                    .any(|o| matches!(o, CalcOp::Implies | CalcOp::Explies | CalcOp::Iff));
                let mut lines = lines.clone();
                let mut first: Option<Type> = None;
                for l in &mut lines {
                    let t = self.expr(l);
                    if logical {
                        self.expect(&l.span, &Type::Bool, &t);
                    }
                    match &first {
                        None => first = Some(t),
                        Some(f) => {
                            let f = f.clone();
                            self.expect(&l.span, &f, &t);
                        }
                    }
                }
                if ops
                    .iter()
                    .any(|o| matches!(o, CalcOp::Lt | CalcOp::Le | CalcOp::Gt | CalcOp::Ge))
                {
                    if let Some(l) = lines.first() {
                        let t = l.ty().clone();
                        self.expect(&l.span, &Type::Int, &t);
                    }
                }
                let hints = hints.iter().map(|h| self.scoped(|cx| cx.block(h))).collect();
                StmtKind::Calc {
                    lines,
                    ops: ops.clone(),
                    hints,
                }
            }
            StmtKind::Match { scrutinee, cases } => self.match_stmt(&span, scrutinee, cases),
            StmtKind::Block(b) => StmtKind::Block(self.scoped(|cx| cx.block(b))),
        };
        out.push(Stmt { kind, span });
    }

    fn check_calc_ops(&mut self, span: &SourceSpan, ops: &[CalcOp]) {
        let has = |f: &dyn Fn(CalcOp) -> bool| ops.iter().any(|&o| f(o));
        let up = has(&|o| matches!(o, CalcOp::Lt | CalcOp::Le));
        let down = has(&|o| matches!(o, CalcOp::Gt | CalcOp::Ge));
        let imp = has(&|o| o == CalcOp::Implies);
        let exp = has(&|o| o == CalcOp::Explies);
        let logical = has(&|o| matches!(o, CalcOp::Implies | CalcOp::Explies | CalcOp::Iff));
        let ne = ops.iter().filter(|&&o| o == CalcOp::Ne).count();
        let bad = (up && down)
            || (imp && exp)
            || (logical && (up || down))
            || (ne > 0 && ops.iter().any(|&o| o != CalcOp::Eq && o != CalcOp::Ne))
            || ne > 1;
        if bad {
            let ops: Vec<&str> = ops.iter().map(|o| o.as_str()).collect();
            self.diags.push(err(
                span,
                FrontKind::CalcRelation,
                format!("calc steps {} do not compose to a single relation", ops.join(", ")),
            ));
        }
    }

    fn match_stmt(&mut self, span: &SourceSpan, scrutinee: &Expr, cases: &[MatchCase]) -> StmtKind {
        let mut scrutinee = scrutinee.clone();
        let t = self.expr(&mut scrutinee);
        let (dt, args) = match self.zonk(&t) {
            Type::Datatype(n, a) => (n, a),
            other => {
                self.diags.push(err(
                    &scrutinee.span,
                    FrontKind::TypeMismatch,
                    format!("match expects a datatype value, found {other}"),
                ));
                return StmtKind::Match {
                    scrutinee,
                    cases: cases.to_vec(),
                };
            }
        };
        let decl = self.g.datatypes[dt.as_str()];
        let inst: HashMap<String, Type> = decl.type_params.iter().cloned().zip(args).collect();
        let mut covered = BTreeSet::new();
        let mut out = Vec::new();
        for c in cases {
            let Some(ctor) = decl.ctors.iter().find(|k| k.name == c.ctor) else {
                self.diags.push(err(
                    &c.span,
                    FrontKind::UnresolvedName,
                    format!("{} is not a constructor of {}", c.ctor, dt),
                ));
                continue;
            };
            if !covered.insert(c.ctor.clone()) {
                self.diags.push(err(
                    &c.span,
                    FrontKind::DuplicateName,
                    format!("duplicate case {}", c.ctor),
                ));
            }
            if ctor.fields.len() != c.binders.len() {
                self.diags.push(err(
                    &c.span,
                    FrontKind::ArityMismatch,
                    format!(
                        "{} has {} fields but the pattern binds {}",
                        c.ctor,
                        ctor.fields.len(),
                        c.binders.len()
                    ),
                ));
                continue;
            }
            let mut c = c.clone();
            c.body = self.scoped(|cx| {
                for (b, f) in c.binders.iter_mut().zip(&ctor.fields) {
                    let t = subst(&f.ty, &inst);
                    b.ty = Some(t.clone());
                    cx.declare(&b.name, t, false, &b.span);
                }
                cx.block(&c.body)
            });
            out.push(c);
        }
        let missing: Vec<&str> = decl
            .ctors
            .iter()
            .filter(|k| !covered.contains(&k.name))
            .map(|k| k.name.as_str())
            .collect();
        if !missing.is_empty() {
            self.diags.push(err(
                span,
                FrontKind::TypeMismatch,
                format!("match is missing cases for {}", missing.join(", ")),
            ));
        }
        StmtKind::Match {
            scrutinee,
            cases: out,
        }
    }

    fn call(&mut self, span: &SourceSpan, targets: Vec<Expr>, callee: &str, mut args: Vec<Expr>) -> StmtKind {
        let Some(m) = self.g.methods.get(callee).copied() else {
            let msg = if self.g.functions.contains_key(callee) {
                format!("{callee} is a function; call it in an expression")
            } else {
                format!("unknown method {callee}")
            };
            self.diags.push(err(span, FrontKind::UnresolvedName, msg));
            return StmtKind::Call {
                targets,
                callee: callee.to_string(),
                args,
            };
        };
        if m.ins.len() != args.len() {
            self.diags.push(err(
                span,
                FrontKind::ArityMismatch,
                format!("{callee} expects {} arguments, got {}", m.ins.len(), args.len()),
            ));
        }
        if !targets.is_empty() && m.outs.len() != targets.len() {
            self.diags.push(err(
                span,
                FrontKind::ArityMismatch,
                format!("{callee} returns {} values, got {} targets", m.outs.len(), targets.len()),
            ));
        }
        let inst = self.instantiate(&m.type_params);
        for (a, p) in args.iter_mut().zip(&m.ins) {
            let t = self.expr(a);
            let want = subst(&p.ty, &inst);
            self.expect(&a.span, &want, &t);
        }
        for (t, p) in targets.iter().zip(&m.outs) {
            let want = subst(&p.ty, &inst);
            let got = t.ty().clone();
            self.expect(&t.span, &want, &got);
        }
        StmtKind::Call {
            targets,
            callee: callee.to_string(),
            args,
        }
    }

    fn lvalue(&mut self, e: &Expr) -> Expr {
        let mut e = e.clone();
        match &mut e.kind {
            ExprKind::Var(n) => match self.lookup(n).cloned() {
                Some(l) => {
                    if !l.mutable {
                        self.diags.push(err(
                            &e.span,
                            FrontKind::Unsupported,
                            format!("cannot assign to {n}, which is not a mutable variable"),
                        ));
                    }
                    e.ty = Some(l.ty);
                }
                None => {
                    self.diags.push(err(
                        &e.span,
                        FrontKind::UnresolvedName,
                        format!("unknown variable {n}"),
                    ));
                    e.ty = Some(Type::Int);
                }
            },
            ExprKind::Index(a, _) => {
                let at = self.expr(a);
                if !matches!(self.shallow(&at), Type::Array(_)) {
                    self.diags.push(err(
                        &e.span,
                        FrontKind::Unsupported,
                        "only array elements and variables can be assigned",
                    ));
                }
                self.expr(&mut e);
            }
            _ => {
                self.diags.push(err(
                    &e.span,
                    FrontKind::Unsupported,
                    "only array elements and variables can be assigned",
                ));
                e.ty = Some(Type::Int);
            }
        }
        e
    }

    fn rhs(&mut self, r: &Rhs) -> Rhs {
        match r {
            Rhs::Expr(e) => {
                let mut e = e.clone();
                self.expr(&mut e);
                Rhs::Expr(e)
            }
            Rhs::ArrayAlloc { elem, len } => {
                let elem = self.user_type(elem, &len.span);
                let mut len = len.clone();
                let t = self.expr(&mut len);
                self.expect(&len.span, &Type::Int, &t);
                Rhs::ArrayAlloc { elem, len }
            }
        }
    }

    /// Resolves a type written inside a declaration body.
    fn user_type(&mut self, t: &Type, span: &SourceSpan) -> Type {
        let arity: HashMap<&str, usize> = self
            .g
            .datatypes
            .iter()
            .map(|(n, d)| (*n, d.type_params.len()))
            .collect();
        match resolve_type(t, &self.tparams, &arity) {
            Ok(t) => t,
            Err(msg) => {
                self.diags.push(err(span, FrontKind::UnresolvedName, msg));
                Type::Int
            }
        }
    }

    // ---- expressions ----

    fn bool_expr(&mut self, e: &mut Expr) {
        let t = self.expr(e);
        self.expect(&e.span, &Type::Bool, &t);
    }

    fn int_operand(&mut self, e: &mut Expr) {
        let t = self.expr(e);
        self.expect(&e.span, &Type::Int, &t);
    }

    fn relation(&mut self, op: BinOp, a: &mut Expr, b: &mut Expr) {
        match op {
            BinOp::Eq | BinOp::Ne => {
                let ta = self.expr(a);
                let tb = self.expr(b);
                self.expect(&b.span, &ta, &tb);
            }
            _ => {
                self.int_operand(a);
                self.int_operand(b);
            }
        }
    }

    /// Types `e` in place and returns its (possibly unresolved) type.
    fn expr(&mut self, e: &mut Expr) -> Type {
        let t = self.expr_inner(e);
        e.ty = Some(t.clone());
        t
    }

    fn expr_inner(&mut self, e: &mut Expr) -> Type {
        let span = e.span.clone();
        match &mut e.kind {
            ExprKind::IntLit(_) => Type::Int,
            ExprKind::BoolLit(_) => Type::Bool,
            ExprKind::Null => Type::Null,
            ExprKind::Var(n) => {
                if let Some(l) = self.lookup(n) {
                    return l.ty.clone();
                }
                if let Some((_, c)) = self.g.ctors.get(n.as_str()) {
                    if c.fields.is_empty() {
                        e.kind = ExprKind::CtorCall(n.clone(), Vec::new());
                        return self.expr_inner(e);
                    }
                }
                self.diags.push(err(
                    &span,
                    FrontKind::UnresolvedName,
                    format!("unknown identifier {n}"),
                ));
                self.fresh()
            }
            ExprKind::Binary(op, a, b) => match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                    self.int_operand(a);
                    self.int_operand(b);
                    Type::Int
                }
                BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Explies | BinOp::Iff => {
                    self.bool_expr(a);
                    self.bool_expr(b);
                    Type::Bool
                }
                _ => {
                    let op = *op;
                    self.relation(op, a, b);
                    Type::Bool
                }
            },
            ExprKind::Chain(es, ops) => {
                for i in 0..es.len() {
                    if es[i].ty.is_none() {
                        self.expr(&mut es[i]);
                    }
                    if i > 0 {
                        let (l, r) = es.split_at_mut(i);
                        let (a, b) = (&mut l[i - 1], &mut r[0]);
                        match ops[i - 1] {
                            BinOp::Eq | BinOp::Ne => {
                                let (ta, tb) = (a.ty().clone(), b.ty().clone());
                                self.expect(&b.span, &ta, &tb);
                            }
                            _ => {
                                let (ta, tb) = (a.ty().clone(), b.ty().clone());
                                self.expect(&a.span, &Type::Int, &ta);
                                self.expect(&b.span, &Type::Int, &tb);
                            }
                        }
                    }
                }
                Type::Bool
            }
            ExprKind::Unary(UnOp::Not, a) => {
                self.bool_expr(a);
                Type::Bool
            }
            ExprKind::Unary(UnOp::Neg, a) => {
                self.int_operand(a);
                Type::Int
            }
            ExprKind::FnCall(name, args) => {
                if let Some(f) = self.g.functions.get(name.as_str()).copied() {
                    if f.params.len() != args.len() {
                        self.diags.push(err(
                            &span,
                            FrontKind::ArityMismatch,
                            format!("{name} expects {} arguments, got {}", f.params.len(), args.len()),
                        ));
                    }
                    let inst = self.instantiate(&f.type_params);
                    for (a, p) in args.iter_mut().zip(&f.params) {
                        let t = self.expr(a);
                        let want = subst(&p.ty, &inst);
                        self.expect(&a.span, &want, &t);
                    }
                    for a in args.iter_mut().skip(f.params.len()) {
                        self.expr(a);
                    }
                    subst(&f.result, &inst)
                } else if self.g.ctors.contains_key(name.as_str()) {
                    e.kind = ExprKind::CtorCall(name.clone(), std::mem::take(args));
                    self.expr_inner(e)
                } else if self.g.methods.contains_key(name.as_str()) {
                    self.diags.push(err(
                        &span,
                        FrontKind::Unsupported,
                        format!("method {name} can only be called as a statement"),
                    ));
                    self.fresh()
                } else {
                    self.diags.push(err(
                        &span,
                        FrontKind::UnresolvedName,
                        format!("unknown function {name}"),
                    ));
                    for a in args.iter_mut() {
                        self.expr(a);
                    }
                    self.fresh()
                }
            }
            ExprKind::CtorCall(name, args) => {
                let Some((dt, c)) = self.g.ctors.get(name.as_str()).copied() else {
                    self.diags.push(err(
                        &span,
                        FrontKind::UnresolvedName,
                        format!("unknown constructor {name}"),
                    ));
                    return self.fresh();
                };
                if c.fields.len() != args.len() {
                    self.diags.push(err(
                        &span,
                        FrontKind::ArityMismatch,
                        format!("{name} expects {} arguments, got {}", c.fields.len(), args.len()),
                    ));
                }
                let inst = self.instantiate(&dt.type_params);
                for (a, p) in args.iter_mut().zip(&c.fields) {
                    let t = self.expr(a);
                    let want = subst(&p.ty, &inst);
                    self.expect(&a.span, &want, &t);
                }
                Type::Datatype(
                    dt.name.clone(),
                    dt.type_params.iter().map(|p| inst[p].clone()).collect(),
                )
            }
            ExprKind::Index(a, i) => {
                let ta = self.expr(a);
                self.int_operand(i);
                match self.shallow(&ta) {
                    Type::Array(t) | Type::Seq(t) => *t,
                    other => {
                        self.diags.push(err(
                            &a.span,
                            FrontKind::TypeMismatch,
                            format!("cannot index a value of type {}", self.zonk(&other)),
                        ));
                        self.fresh()
                    }
                }
            }
            ExprKind::Length(a) => {
                let ta = self.expr(a);
                if !matches!(self.shallow(&ta), Type::Array(_) | Type::Seq(_)) {
                    self.diags.push(err(
                        &a.span,
                        FrontKind::TypeMismatch,
                        "Length is defined on arrays and sequences",
                    ));
                }
                Type::Int
            }
            ExprKind::Slice(a, lo, hi) => {
                let ta = self.expr(a);
                if let Some(lo) = lo {
                    self.int_operand(lo);
                }
                if let Some(hi) = hi {
                    self.int_operand(hi);
                }
                match self.shallow(&ta) {
                    Type::Array(t) | Type::Seq(t) => Type::Seq(t),
                    other => {
                        self.diags.push(err(
                            &a.span,
                            FrontKind::TypeMismatch,
                            format!("cannot slice a value of type {}", self.zonk(&other)),
                        ));
                        self.fresh()
                    }
                }
            }
            ExprKind::MultisetOf(a) => {
                let ta = self.expr(a);
                match self.shallow(&ta) {
                    Type::Seq(t) => Type::Multiset(t),
                    other => {
                        self.diags.push(err(
                            &a.span,
                            FrontKind::TypeMismatch,
                            format!("multiset expects a sequence, found {}", self.zonk(&other)),
                        ));
                        self.fresh()
                    }
                }
            }
            ExprKind::Old(a) => {
                if !self.two_state {
                    self.diags.push(err(
                        &span,
                        FrontKind::OldContext,
                        "old is only allowed in postconditions and method bodies",
                    ));
                }
                self.expr(a)
            }
            ExprKind::Forall(bvs, body) => {
                self.scopes.push(HashMap::new());
                for b in bvs.iter_mut() {
                    let t = match &b.ty {
                        Some(t) => self.user_type(t, &span),
                        None => self.fresh(),
                    };
                    b.ty = Some(t.clone());
                    let name = b.name.clone();
                    self.declare(&name, t, false, &span);
                }
                self.bool_expr(body);
                self.scopes.pop();
                Type::Bool
            }
            ExprKind::Field(a, f) => {
                let ta = self.expr(a);
                let f = f.clone();
                match self.shallow(&ta) {
                    Type::Datatype(n, args) => {
                        let dt = self.g.datatypes[n.as_str()];
                        let inst: HashMap<String, Type> =
                            dt.type_params.iter().cloned().zip(args).collect();
                        if let Some(c) = f.strip_suffix('?') {
                            if dt.ctors.iter().any(|k| k.name == c) {
                                return Type::Bool;
                            }
                        }
                        if let Some(p) = dt.ctors.iter().flat_map(|c| &c.fields).find(|p| p.name == f) {
                            subst(&p.ty, &inst)
                        } else {
                            self.diags.push(err(
                                &span,
                                FrontKind::UnresolvedName,
                                format!("{n} has no member {f}"),
                            ));
                            self.fresh()
                        }
                    }
                    other => {
                        self.diags.push(err(
                            &span,
                            FrontKind::TypeMismatch,
                            format!("member {f} of a value of type {}", self.zonk(&other)),
                        ));
                        self.fresh()
                    }
                }
            }
            ExprKind::Ite(c, t, f) => {
                self.bool_expr(c);
                let tt = self.expr(t);
                let tf = self.expr(f);
                self.expect(&f.span, &tt, &tf);
                tt
            }
        }
    }
}

fn rhs_type(r: &Rhs) -> (Type, &SourceSpan) {
    match r {
        Rhs::Expr(e) => (e.ty().clone(), &e.span),
        Rhs::ArrayAlloc { elem, len } => (Type::Array(Box::new(elem.clone())), &len.span),
    }
}

/// Collects variables assigned on every path through `b`.
pub(crate) fn definitely_assigned(b: &Block, assigned: &mut BTreeSet<String>) {
    for s in b {
        match &s.kind {
            StmtKind::VarDecl { decls, rhs, .. } => {
                if !rhs.is_empty() {
                    assigned.extend(decls.iter().map(|d| d.name.clone()));
                }
            }
            StmtKind::Assign { lhs, .. } | StmtKind::Call { targets: lhs, .. } => {
                for e in lhs {
                    if let ExprKind::Var(n) = &e.kind {
                        assigned.insert(n.clone());
                    }
                }
            }
            StmtKind::If { then, els, .. } => {
                let mut a = assigned.clone();
                definitely_assigned(then, &mut a);
                if let Some(els) = els {
                    let mut b = assigned.clone();
                    definitely_assigned(els, &mut b);
                    assigned.extend(a.intersection(&b).cloned().collect::<Vec<_>>());
                }
            }
            StmtKind::Match { cases, .. } => {
                let mut common: Option<BTreeSet<String>> = None;
                for c in cases {
                    let mut a = assigned.clone();
                    definitely_assigned(&c.body, &mut a);
                    common = Some(match common {
                        None => a,
                        Some(x) => x.intersection(&a).cloned().collect(),
                    });
                }
                if let Some(c) = common {
                    assigned.extend(c);
                }
            }
            StmtKind::Block(b) => definitely_assigned(b, assigned),
            StmtKind::While { .. }
            | StmtKind::Assert(_)
            | StmtKind::Assume(_)
            | StmtKind::Calc { .. } => {}
        }
    }
}
