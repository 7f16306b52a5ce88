// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Three-valued evaluation of solver terms under a model.

use super::{euclid_div, euclid_mod, Interp, Value};
use crate::resolve::TypedProgram;
use crate::vcgen::term::{Fun, Op, Term};

/// Evaluates `t`. `consts` gives values of free constants; `apps` gives a
/// model's value for a user-function application and is consulted only for
/// heap-reading functions and for arguments that violate the precondition.
/// `None` means unknown.
pub fn eval_term(
    tp: &TypedProgram,
    t: &Term,
    consts: &dyn Fn(&str) -> Option<Value>,
    apps: &dyn Fn(&Term) -> Option<Value>,
) -> Option<Value> {
    Ev { tp, consts, apps }.go(t)
}

struct Ev<'a> {
    tp: &'a TypedProgram,
    consts: &'a dyn Fn(&str) -> Option<Value>,
    apps: &'a dyn Fn(&Term) -> Option<Value>,
}

impl Ev<'_> {
    fn int(&self, t: &Term) -> Option<i64> {
        self.go(t)?.as_int()
    }

    fn boolean(&self, t: &Term) -> Option<bool> {
        self.go(t)?.as_bool()
    }

    fn go(&self, t: &Term) -> Option<Value> {
        match t {
            Term::Int(n) => Some(Value::Int(*n)),
            Term::Bool(b) => Some(Value::Bool(*b)),
            Term::Null => Some(Value::Null),
            Term::Const(n, _) => (self.consts)(n),
            Term::Bound(..) | Term::Forall(..) => None,
            Term::Op(o, args) => self.op(*o, args),
            Term::App(f, args) => self.app(t, f, args),
        }
    }

    fn op(&self, o: Op, a: &[Term]) -> Option<Value> {
        let b = |x: bool| Some(Value::Bool(x));
        let i = |x: i64| Some(Value::Int(x));
        match o {
            Op::And => {
                let mut all = true;
                for x in a {
                    match self.boolean(x) {
                        Some(false) => return b(false),
                        Some(true) => {}
                        None => all = false,
                    }
                }
                all.then_some(Value::Bool(true))
            }
            Op::Or => {
                let mut all = true;
                for x in a {
                    match self.boolean(x) {
                        Some(true) => return b(true),
                        Some(false) => {}
                        None => all = false,
                    }
                }
                all.then_some(Value::Bool(false))
            }
            Op::Implies => match (self.boolean(&a[0]), self.boolean(&a[1])) {
                (Some(false), _) | (_, Some(true)) => b(true),
                (Some(true), Some(false)) => b(false),
                _ => None,
            },
            Op::Not => b(!self.boolean(&a[0])?),
            Op::Ite => {
                if self.boolean(&a[0])? {
                    self.go(&a[1])
                } else {
                    self.go(&a[2])
                }
            }
            Op::Eq => b(self.go(&a[0])? == self.go(&a[1])?),
            Op::Neg => i(self.int(&a[0])?.checked_neg()?),
            Op::Select | Op::Store => None,
            Op::Mul => match (self.int(&a[0]), self.int(&a[1])) {
                (Some(0), _) | (_, Some(0)) => i(0),
                (Some(x), Some(y)) => i(x.checked_mul(y)?),
                _ => None,
            },
            _ => {
                let (x, y) = (self.int(&a[0])?, self.int(&a[1])?);
                match o {
                    Op::Add => i(x.checked_add(y)?),
                    Op::Sub => i(x.checked_sub(y)?),
                    Op::Mul => i(x.checked_mul(y)?),
                    Op::Div => i(euclid_div(x, y)?),
                    Op::Mod => i(euclid_mod(x, y)?),
                    Op::Lt => b(x < y),
                    Op::Le => b(x <= y),
                    Op::Gt => b(x > y),
                    Op::Ge => b(x >= y),
                    _ => None,
                }
            }
        }
    }

    fn app(&self, whole: &Term, f: &Fun, args: &[Term]) -> Option<Value> {
        match f {
            Fun::User { name, heaps, .. } => {
                if !heaps.is_empty() {
                    return (self.apps)(whole);
                }
                let vals: Vec<Value> = args.iter().map(|a| self.go(a)).collect::<Option<_>>()?;
                let mut it = Interp::new(self.tp, true);
                it.budget = 1_000_000;
                // Outside its precondition a function is unconstrained, so
                // the model's value for the application is as good as any.
                match it.function_requires_hold(name, &vals) {
                    Ok(true) => it.call_function(name, vals).ok(),
                    Ok(false) => (self.apps)(whole),
                    Err(_) => None,
                }
            }
            Fun::Ctor { name, .. } => {
                let vals: Option<Vec<Value>> = args.iter().map(|a| self.go(a)).collect();
                Some(Value::Data(name.clone(), vals?))
            }
            Fun::IsCtor { name, .. } => match self.go(&args[0])? {
                Value::Data(c, _) => Some(Value::Bool(&c == name)),
                _ => None,
            },
            Fun::Field { ctor, field, .. } => match self.go(&args[0])? {
                Value::Data(c, fs) if &c == ctor => {
                    let (_, k) = self.tp.ctor(ctor)?;
                    let i = k.fields.iter().position(|p| &p.name == field)?;
                    fs.get(i).cloned()
                }
                _ => None,
            },
            _ => None,
        }
    }
}
