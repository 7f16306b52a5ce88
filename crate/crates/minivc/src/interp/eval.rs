// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{euclid_div, euclid_mod, Env, FaultKind, Interp, RuntimeFault, Value};
use crate::span::SourceSpan;
use crate::syntax::ast::*;

type Heap = Vec<Vec<Value>>;

fn overflow(span: &SourceSpan) -> RuntimeFault {
    RuntimeFault::new(FaultKind::Overflow, span, "integer overflow")
}

fn int(v: &Value, span: &SourceSpan) -> Result<i64, RuntimeFault> {
    v.as_int()
        .ok_or_else(|| RuntimeFault::new(FaultKind::Unevaluable, span, "expected an integer"))
}

fn boolean(v: &Value, span: &SourceSpan) -> Result<bool, RuntimeFault> {
    v.as_bool()
        .ok_or_else(|| RuntimeFault::new(FaultKind::Unevaluable, span, "expected a boolean"))
}

/// Binary operation on two evaluated operands (not the short-circuit ones).
pub(super) fn arith(o: BinOp, a: &Value, b: &Value, span: &SourceSpan) -> Result<Value, RuntimeFault> {
    Ok(match o {
        BinOp::Eq | BinOp::Iff => Value::Bool(a == b),
        BinOp::Ne => Value::Bool(a != b),
        _ => {
            let (x, y) = (int(a, span)?, int(b, span)?);
            match o {
                BinOp::Add => Value::Int(x.checked_add(y).ok_or_else(|| overflow(span))?),
                BinOp::Sub => Value::Int(x.checked_sub(y).ok_or_else(|| overflow(span))?),
                BinOp::Mul => Value::Int(x.checked_mul(y).ok_or_else(|| overflow(span))?),
                BinOp::Div | BinOp::Mod => {
                    if y == 0 {
                        return Err(RuntimeFault::new(FaultKind::Division, span, "division by zero"));
                    }
                    let r = if o == BinOp::Div {
                        euclid_div(x, y)
                    } else {
                        euclid_mod(x, y)
                    };
                    Value::Int(r.ok_or_else(|| overflow(span))?)
                }
                BinOp::Lt => Value::Bool(x < y),
                BinOp::Le => Value::Bool(x <= y),
                BinOp::Gt => Value::Bool(x > y),
                BinOp::Ge => Value::Bool(x >= y),
                _ => unreachable!("short-circuit operators are evaluated lazily"),
            }
        }
    })
}

impl Interp<'_> {
    pub fn eval_expr(&mut self, e: &Expr, env: &Env, old: Option<&Heap>) -> Result<Value, RuntimeFault> {
        let sp = &e.span;
        match &e.kind {
            ExprKind::IntLit(n) => Ok(Value::Int(*n)),
            ExprKind::BoolLit(b) => Ok(Value::Bool(*b)),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::Var(v) => env.get(v).cloned().ok_or_else(|| {
                RuntimeFault::new(FaultKind::Unevaluable, sp, format!("unbound variable {v}"))
            }),
            ExprKind::Binary(o, a, b) => {
                let av = self.eval_expr(a, env, old)?;
                match o {
                    BinOp::And if !boolean(&av, sp)? => Ok(Value::Bool(false)),
                    BinOp::Or if boolean(&av, sp)? => Ok(Value::Bool(true)),
                    BinOp::Implies if !boolean(&av, sp)? => Ok(Value::Bool(true)),
                    BinOp::And | BinOp::Or | BinOp::Implies => self.eval_expr(b, env, old),
                    BinOp::Explies => {
                        // a <== b evaluates b first.
                        let bv = self.eval_expr(b, env, old)?;
                        if !boolean(&bv, sp)? {
                            return Ok(Value::Bool(true));
                        }
                        Ok(av)
                    }
                    _ => {
                        let bv = self.eval_expr(b, env, old)?;
                        arith(*o, &av, &bv, sp)
                    }
                }
            }
            ExprKind::Chain(es, ops) => {
                let mut prev = self.eval_expr(&es[0], env, old)?;
                for (o, x) in ops.iter().zip(&es[1..]) {
                    let v = self.eval_expr(x, env, old)?;
                    if arith(*o, &prev, &v, sp)? != Value::Bool(true) {
                        return Ok(Value::Bool(false));
                    }
                    prev = v;
                }
                Ok(Value::Bool(true))
            }
            ExprKind::Unary(UnOp::Not, a) => Ok(Value::Bool(!boolean(&self.eval_expr(a, env, old)?, sp)?)),
            ExprKind::Unary(UnOp::Neg, a) => {
                let n = int(&self.eval_expr(a, env, old)?, sp)?;
                Ok(Value::Int(n.checked_neg().ok_or_else(|| overflow(sp))?))
            }
            ExprKind::FnCall(f, args) => {
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval_expr(a, env, old)?);
                }
                self.call_function(f, vals)
            }
            ExprKind::CtorCall(c, args) => {
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval_expr(a, env, old)?);
                }
                Ok(Value::Data(c.clone(), vals))
            }
            ExprKind::Index(a, i) => {
                let av = self.eval_expr(a, env, old)?;
                let iv = int(&self.eval_expr(i, env, old)?, sp)?;
                let xs = self.elements(&av, sp)?;
                if iv < 0 || iv as usize >= xs.len() {
                    return Err(RuntimeFault::new(
                        FaultKind::Bounds,
                        sp,
                        format!("index {iv} out of range 0..{}", xs.len()),
                    ));
                }
                Ok(xs[iv as usize].clone())
            }
            ExprKind::Length(a) => {
                let av = self.eval_expr(a, env, old)?;
                Ok(Value::Int(self.elements(&av, sp)?.len() as i64))
            }
            ExprKind::Slice(a, lo, hi) => {
                let av = self.eval_expr(a, env, old)?;
                let xs = self.elements(&av, sp)?;
                let lo = match lo {
                    Some(x) => int(&self.eval_expr(x, env, old)?, sp)?,
                    None => 0,
                };
                let hi = match hi {
                    Some(x) => int(&self.eval_expr(x, env, old)?, sp)?,
                    None => xs.len() as i64,
                };
                if !(0 <= lo && lo <= hi && hi as usize <= xs.len()) {
                    return Err(RuntimeFault::new(FaultKind::Bounds, sp, "slice out of range"));
                }
                Ok(Value::Seq(xs[lo as usize..hi as usize].to_vec()))
            }
            ExprKind::MultisetOf(a) => {
                let av = self.eval_expr(a, env, old)?;
                Ok(Value::multiset_of(&self.elements(&av, sp)?))
            }
            // Function bodies inside old(..) read the swapped-in heap too.
            ExprKind::Old(a) => match old {
                Some(h) => {
                    let cur = std::mem::replace(&mut self.heap, h.clone());
                    let r = self.eval_expr(a, env, None);
                    self.heap = cur;
                    r
                }
                None => self.eval_expr(a, env, None),
            },
            ExprKind::Forall(bvs, body) => self.forall(bvs, body, env, old, sp),
            ExprKind::Field(a, f) => {
                let av = self.eval_expr(a, env, old)?;
                let Value::Data(c, fields) = &av else {
                    return Err(RuntimeFault::new(FaultKind::Unevaluable, sp, "not a datatype value"));
                };
                if let Some(k) = f.strip_suffix('?') {
                    return Ok(Value::Bool(c == k));
                }
                let (_, ctor) = self.tp.ctor(c).expect("resolved ctor");
                match ctor.fields.iter().position(|p| &p.name == f) {
                    Some(i) => Ok(fields[i].clone()),
                    None => Err(RuntimeFault::new(
                        FaultKind::Precondition,
                        sp,
                        format!("destructor {f} applied to {c}"),
                    )),
                }
            }
            ExprKind::Ite(c, t, f) => {
                if boolean(&self.eval_expr(c, env, old)?, sp)? {
                    self.eval_expr(t, env, old)
                } else {
                    self.eval_expr(f, env, old)
                }
            }
        }
    }

    fn elements(&self, v: &Value, sp: &SourceSpan) -> Result<Vec<Value>, RuntimeFault> {
        match v {
            Value::Array(r) => self.heap.get(*r).cloned().ok_or_else(|| {
                RuntimeFault::new(FaultKind::Unevaluable, sp, "array allocated after the old state")
            }),
            Value::Seq(xs) => Ok(xs.clone()),
            Value::Null => Err(RuntimeFault::new(FaultKind::Null, sp, "null dereference")),
            _ => Err(RuntimeFault::new(FaultKind::Unevaluable, sp, "not a sequence")),
        }
    }

    /// Evaluates a quantifier by enumerating each bound variable over the
    /// range implied by the comparisons in its antecedent.
    fn forall(
        &mut self,
        bvs: &[BoundVar],
        body: &Expr,
        env: &Env,
        old: Option<&Heap>,
        sp: &SourceSpan,
    ) -> Result<Value, RuntimeFault> {
        let names: Vec<&str> = bvs.iter().map(|b| b.name.as_str()).collect();
        let ante = match &body.kind {
            ExprKind::Binary(BinOp::Implies, a, _) => Some(a.as_ref()),
            _ => None,
        };
        let mut pairs = Vec::new();
        if let Some(a) = ante {
            comparisons(a, &mut pairs);
        }
        let mut ranges = Vec::new();
        for n in &names {
            let (mut lo, mut hi): (Option<i64>, Option<i64>) = (None, None);
            for (x, y, strict) in &pairs {
                // x < y or x <= y.
                let is = |e: &Expr| matches!(&e.kind, ExprKind::Var(v) if v == n);
                let closed = |e: &Expr| e.free_vars().iter().all(|v| !names.contains(&v.as_str()));
                if is(y) && closed(x) {
                    let v = int(&self.eval_expr(x, env, old)?, sp)? + *strict as i64;
                    lo = Some(lo.map_or(v, |l| l.max(v)));
                }
                if is(x) && closed(y) {
                    let v = int(&self.eval_expr(y, env, old)?, sp)? - *strict as i64;
                    hi = Some(hi.map_or(v, |h| h.min(v)));
                }
            }
            match (lo, hi) {
                (Some(l), Some(h)) => ranges.push((l, h)),
                _ => {
                    return Err(RuntimeFault::new(
                        FaultKind::Unevaluable,
                        sp,
                        format!("cannot bound quantified variable {n}"),
                    ))
                }
            }
        }
        let mut env = env.clone();
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|(l, h)| l > h) {
            return Ok(Value::Bool(true));
        }
        loop {
            for (n, v) in names.iter().zip(&idx) {
                env.insert(n.to_string(), Value::Int(*v));
            }
            self.tick(sp)?;
            if !boolean(&self.eval_expr(body, &env, old)?, sp)? {
                return Ok(Value::Bool(false));
            }
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return Ok(Value::Bool(true));
                }
                k -= 1;
                if idx[k] < ranges[k].1 {
                    idx[k] += 1;
                    break;
                }
                idx[k] = ranges[k].0;
            }
        }
    }
}

/// Ordered pairs `(x, y, strict)` meaning `x < y` (strict) or `x <= y`
/// implied by the conjunction `e`, taking chains transitively.
fn comparisons<'e>(e: &'e Expr, out: &mut Vec<(&'e Expr, &'e Expr, bool)>) {
    match &e.kind {
        ExprKind::Binary(BinOp::And, a, b) => {
            comparisons(a, out);
            comparisons(b, out);
        }
        ExprKind::Binary(o, a, b) => push_cmp(*o, a, b, out),
        ExprKind::Chain(es, ops) => {
            for i in 0..ops.len() {
                for j in i + 1..es.len() {
                    let run = &ops[i..j];
                    if run.iter().all(|o| matches!(o, BinOp::Lt | BinOp::Le)) {
                        out.push((&es[i], &es[j], run.contains(&BinOp::Lt)));
                    } else if run.iter().all(|o| matches!(o, BinOp::Gt | BinOp::Ge)) {
                        out.push((&es[j], &es[i], run.contains(&BinOp::Gt)));
                    }
                }
            }
        }
        _ => {}
    }
}

fn push_cmp<'e>(o: BinOp, a: &'e Expr, b: &'e Expr, out: &mut Vec<(&'e Expr, &'e Expr, bool)>) {
    match o {
        BinOp::Lt => out.push((a, b, true)),
        BinOp::Le => out.push((a, b, false)),
        BinOp::Gt => out.push((b, a, true)),
        BinOp::Ge => out.push((b, a, false)),
        BinOp::Eq => {
            out.push((a, b, false));
            out.push((b, a, false));
        }
        _ => {}
    }
}
