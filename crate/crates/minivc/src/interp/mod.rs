// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reference interpreter for the ghost-erased subset.
//!
//! With contract checking on, requires/ensures, loop invariants and
//! assertions are evaluated and ghost code runs too; lemma calls and calc
//! statements are always skipped. Quantifiers are evaluated by enumerating
//! the integer range their antecedent bounds.

mod eval;
mod term_eval;
mod value;

pub use term_eval::eval_term;
pub use value::{euclid_div, euclid_mod, FaultKind, RuntimeFault, Show, Value};

use crate::resolve::TypedProgram;
use crate::span::SourceSpan;
use crate::syntax::ast::*;
use std::collections::HashMap;

pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;
/// Deepest call nesting before a run is treated as nonterminating.
pub const MAX_DEPTH: usize = 200;
const STACK_RED_ZONE: usize = 256 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

pub type Env = HashMap<String, Value>;

pub struct Interp<'a> {
    pub tp: &'a TypedProgram,
    pub heap: Vec<Vec<Value>>,
    pub check_contracts: bool,
    pub budget: u64,
    steps: u64,
    depth: usize,
    ghosts: Vec<String>,
}

impl<'a> Interp<'a> {
    pub fn new(tp: &'a TypedProgram, check_contracts: bool) -> Self {
        Interp {
            tp,
            heap: Vec::new(),
            check_contracts,
            budget: DEFAULT_STEP_BUDGET,
            steps: 0,
            depth: 0,
            ghosts: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn alloc(&mut self, xs: Vec<Value>) -> Value {
        self.heap.push(xs);
        Value::Array(self.heap.len() - 1)
    }

    /// Current contents of an array value.
    pub fn array(&self, v: &Value) -> Option<&[Value]> {
        match v {
            Value::Array(i) => self.heap.get(*i).map(Vec::as_slice),
            _ => None,
        }
    }

    pub fn show(&self, v: &Value) -> String {
        Show(v, &self.heap).to_string()
    }

    fn tick(&mut self, span: &SourceSpan) -> Result<(), RuntimeFault> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(RuntimeFault::new(
                FaultKind::NonterminationBudget,
                span,
                format!("step budget of {} exhausted", self.budget),
            ));
        }
        Ok(())
    }

    fn enter(&mut self, span: &SourceSpan) -> Result<(), RuntimeFault> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            self.depth -= 1;
            return Err(RuntimeFault::new(
                FaultKind::NonterminationBudget,
                span,
                format!("call depth exceeds {MAX_DEPTH}"),
            ));
        }
        Ok(())
    }

    /// Whether the precondition of function `name` holds for `args`.
    pub fn function_requires_hold(&mut self, name: &str, args: &[Value]) -> Result<bool, RuntimeFault> {
        let f = self.tp.function(name).expect("resolved function");
        let env: Env = f.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()).collect();
        for r in &f.requires {
            if !self.truth(r, &env, None)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the precondition of method `name` holds for `args`.
    pub fn method_requires_hold(&mut self, name: &str, args: &[Value]) -> Result<bool, RuntimeFault> {
        let m = self.tp.method(name).expect("resolved method");
        let mut env: Env = m.ins.iter().map(|p| p.name.clone()).zip(args.iter().cloned()).collect();
        for o in &m.outs {
            env.insert(o.name.clone(), default_value(&o.ty));
        }
        for r in &m.requires {
            if !self.truth(r, &env, None)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Applies function `name` to argument values.
    pub fn call_function(&mut self, name: &str, args: Vec<Value>) -> Result<Value, RuntimeFault> {
        let f = self.tp.function(name).expect("resolved function");
        let env: Env = f.params.iter().map(|p| p.name.clone()).zip(args).collect();
        if self.check_contracts {
            for r in &f.requires {
                if !self.truth(r, &env, None)? {
                    return Err(RuntimeFault::new(
                        FaultKind::Precondition,
                        &r.span,
                        format!("precondition of {name} violated"),
                    ));
                }
            }
        } else if !f.is_compiled {
            return Err(RuntimeFault::new(
                FaultKind::Unevaluable,
                &f.span,
                format!("{name} is a specification-only function"),
            ));
        }
        let Some(body) = &f.body else {
            return Err(RuntimeFault::new(
                FaultKind::Unevaluable,
                &f.span,
                format!("{name} has no body"),
            ));
        };
        self.tick(&f.span)?;
        self.enter(&f.span)?;
        let r = stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, || self.eval_expr(body, &env, None));
        self.depth = self.depth.saturating_sub(1);
        r
    }

    /// Runs method `name` and returns its out-parameter values.
    pub fn run_method(&mut self, name: &str, args: Vec<Value>) -> Result<Vec<Value>, RuntimeFault> {
        let tp = self.tp;
        let m = tp.method(name).expect("resolved method");
        let mut env: Env = m.ins.iter().map(|p| p.name.clone()).zip(args).collect();
        for o in &m.outs {
            env.insert(o.name.clone(), default_value(&o.ty));
        }
        if self.check_contracts {
            for r in &m.requires {
                if !self.truth(r, &env, None)? {
                    return Err(RuntimeFault::new(
                        FaultKind::Precondition,
                        &r.span,
                        format!("precondition of {name} violated"),
                    ));
                }
            }
        }
        let Some(body) = &m.body else {
            return Err(RuntimeFault::new(
                FaultKind::Unevaluable,
                &m.span,
                format!("{name} has no body"),
            ));
        };
        let old = self.check_contracts.then(|| self.heap.clone());
        self.enter(&m.span)?;
        let r = stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, || {
            self.block(body, &mut env, old.as_ref())
        });
        self.depth = self.depth.saturating_sub(1);
        r?;
        if self.check_contracts {
            for e in &m.ensures {
                if !self.truth(e, &env, old.as_ref())? {
                    return Err(RuntimeFault::new(
                        FaultKind::Postcondition,
                        &e.span,
                        format!("postcondition of {name} violated"),
                    ));
                }
            }
        }
        Ok(m.outs.iter().map(|o| env[&o.name].clone()).collect())
    }

    fn truth(&mut self, e: &Expr, env: &Env, old: Option<&Vec<Vec<Value>>>) -> Result<bool, RuntimeFault> {
        Ok(self.eval_expr(e, env, old)?.as_bool().unwrap_or(false))
    }

    fn is_ghost_stmt(&self, s: &Stmt) -> bool {
        let ghosts = &self.ghosts;
        match &s.kind {
            StmtKind::VarDecl { ghost, .. } => *ghost,
            StmtKind::Assign { lhs, .. } => lhs
                .iter()
                .any(|l| matches!(&l.kind, ExprKind::Var(v) if ghosts.contains(v))),
            StmtKind::Assert(_) | StmtKind::Assume(_) | StmtKind::Calc { .. } => true,
            StmtKind::Call { callee, .. } => self
                .tp
                .method(callee)
                .is_some_and(|m| m.is_lemma || m.is_ghost),
            _ => false,
        }
    }

    fn block(&mut self, b: &[Stmt], env: &mut Env, old: Option<&Vec<Vec<Value>>>) -> Result<(), RuntimeFault> {
        let mut declared: Vec<(String, Option<Value>)> = Vec::new();
        let n_ghosts = self.ghosts.len();
        let r = (|| {
            for s in b {
                if let StmtKind::VarDecl { decls, ghost: true, .. } = &s.kind {
                    self.ghosts.extend(decls.iter().map(|d| d.name.clone()));
                }
                if self.is_ghost_stmt(s) && !self.check_contracts {
                    continue;
                }
                self.stmt(s, env, old, &mut declared)?;
            }
            Ok(())
        })();
        self.ghosts.truncate(n_ghosts);
        for (n, v) in declared.into_iter().rev() {
            match v {
                Some(v) => env.insert(n, v),
                None => env.remove(&n),
            };
        }
        r
    }

    fn stmt(
        &mut self,
        s: &Stmt,
        env: &mut Env,
        old: Option<&Vec<Vec<Value>>>,
        declared: &mut Vec<(String, Option<Value>)>,
    ) -> Result<(), RuntimeFault> {
        self.tick(&s.span)?;
        match &s.kind {
            StmtKind::VarDecl { decls, rhs, .. } => {
                let mut vals = Vec::new();
                for r in rhs {
                    vals.push(self.rhs(r, env, old)?);
                }
                for (i, d) in decls.iter().enumerate() {
                    let v = match vals.get(i) {
                        Some(v) => v.clone(),
                        None => default_value(d.ty.as_ref().unwrap_or(&Type::Int)),
                    };
                    declared.push((d.name.clone(), env.insert(d.name.clone(), v)));
                }
            }
            StmtKind::Assign { lhs, rhs } => {
                let mut targets = Vec::new();
                for l in lhs {
                    targets.push(self.target(l, env, old)?);
                }
                let mut vals = Vec::new();
                for r in rhs {
                    vals.push(self.rhs(r, env, old)?);
                }
                for (t, v) in targets.into_iter().zip(vals) {
                    self.store(t, v, env);
                }
            }
            StmtKind::Call {
                targets,
                callee,
                args,
            } => {
                let m = self.tp.method(callee).expect("resolved method");
                if m.is_lemma {
                    return Ok(());
                }
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval_expr(a, env, old)?);
                }
                let mut ts = Vec::new();
                for t in targets {
                    ts.push(self.target(t, env, old)?);
                }
                let outs = self.run_method(callee, vals)?;
                for (t, v) in ts.into_iter().zip(outs) {
                    self.store(t, v, env);
                }
            }
            StmtKind::If { cond, then, els } => {
                if self.truth(cond, env, old)? {
                    self.block(then, env, old)?;
                } else if let Some(e) = els {
                    self.block(e, env, old)?;
                }
            }
            StmtKind::While {
                guard,
                invariants,
                body,
                ..
            } => loop {
                if self.check_contracts {
                    for inv in invariants {
                        if !self.truth(inv, env, old)? {
                            return Err(RuntimeFault::new(
                                FaultKind::Invariant,
                                &inv.span,
                                "loop invariant violated",
                            ));
                        }
                    }
                }
                if !self.truth(guard, env, old)? {
                    break;
                }
                self.tick(&s.span)?;
                self.block(body, env, old)?;
            },
            StmtKind::Assert(e) => {
                if !self.truth(e, env, old)? {
                    return Err(RuntimeFault::new(FaultKind::Assert, &e.span, "assertion violated"));
                }
            }
            StmtKind::Assume(_) | StmtKind::Calc { .. } => {}
            StmtKind::Match { scrutinee, cases } => {
                let v = self.eval_expr(scrutinee, env, old)?;
                let Value::Data(c, fields) = v else {
                    return Err(RuntimeFault::new(
                        FaultKind::Unevaluable,
                        &scrutinee.span,
                        "match on a non-datatype value",
                    ));
                };
                if let Some(case) = cases.iter().find(|k| k.ctor == c) {
                    let mut saved = Vec::new();
                    for (b, f) in case.binders.iter().zip(fields) {
                        saved.push((b.name.clone(), env.insert(b.name.clone(), f)));
                    }
                    let r = self.block(&case.body, env, old);
                    for (n, v) in saved.into_iter().rev() {
                        match v {
                            Some(v) => env.insert(n, v),
                            None => env.remove(&n),
                        };
                    }
                    r?;
                }
            }
            StmtKind::Block(b) => self.block(b, env, old)?,
        }
        Ok(())
    }

    fn rhs(&mut self, r: &Rhs, env: &Env, old: Option<&Vec<Vec<Value>>>) -> Result<Value, RuntimeFault> {
        match r {
            Rhs::Expr(e) => self.eval_expr(e, env, old),
            Rhs::ArrayAlloc { elem, len } => {
                let n = self.eval_expr(len, env, old)?.as_int().unwrap_or(-1);
                if n < 0 {
                    return Err(RuntimeFault::new(FaultKind::Bounds, &len.span, "negative array size"));
                }
                Ok(self.alloc(vec![default_value(elem); n as usize]))
            }
        }
    }

    fn target(&mut self, l: &Expr, env: &Env, old: Option<&Vec<Vec<Value>>>) -> Result<Target, RuntimeFault> {
        match &l.kind {
            ExprKind::Var(v) => Ok(Target::Var(v.clone())),
            ExprKind::Index(a, i) => {
                let av = self.eval_expr(a, env, old)?;
                let iv = self.eval_expr(i, env, old)?.as_int().unwrap_or(-1);
                let r = self.array_ref(&av, &l.span)?;
                if iv < 0 || iv as usize >= self.heap[r].len() {
                    return Err(RuntimeFault::new(
                        FaultKind::Bounds,
                        &l.span,
                        format!("index {iv} out of range"),
                    ));
                }
                Ok(Target::Elem(r, iv as usize))
            }
            _ => Err(RuntimeFault::new(FaultKind::Unevaluable, &l.span, "bad assignment target")),
        }
    }

    fn store(&mut self, t: Target, v: Value, env: &mut Env) {
        match t {
            Target::Var(n) => {
                env.insert(n, v);
            }
            Target::Elem(r, i) => self.heap[r][i] = v,
        }
    }

    fn array_ref(&self, v: &Value, span: &SourceSpan) -> Result<usize, RuntimeFault> {
        match v {
            Value::Array(r) => Ok(*r),
            _ => Err(RuntimeFault::new(FaultKind::Null, span, "null dereference")),
        }
    }
}

enum Target {
    Var(String),
    Elem(usize, usize),
}

pub fn default_value(t: &Type) -> Value {
    match t {
        Type::Bool => Value::Bool(false),
        Type::Array(_) | Type::Null => Value::Null,
        Type::Seq(_) => Value::Seq(Vec::new()),
        Type::Multiset(_) => Value::Multiset(Default::default()),
        _ => Value::Int(0),
    }
}

/// Parses a command-line argument of type `t`: an integer, `true`/`false`,
/// or a bracketed list such as `[7,2,6]` for arrays and sequences.
pub fn parse_value(interp: &mut Interp, text: &str, t: &Type) -> Option<Value> {
    let text = text.trim();
    match t {
        Type::Int | Type::Infer(_) => text.parse().ok().map(Value::Int),
        Type::Bool => text.parse().ok().map(Value::Bool),
        Type::Array(e) | Type::Seq(e) => {
            if text == "null" && t.is_array() {
                return Some(Value::Null);
            }
            let inner = text.strip_prefix('[')?.strip_suffix(']')?;
            let mut xs = Vec::new();
            for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                xs.push(parse_value(interp, part, e)?);
            }
            Some(if t.is_array() {
                interp.alloc(xs)
            } else {
                Value::Seq(xs)
            })
        }
        _ => None,
    }
}
