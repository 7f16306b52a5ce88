// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! First-order terms handed to the solver.

use std::collections::BTreeMap;
use std::fmt;

/// Logical sorts. Arrays are references into per-element-sort heaps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    Ref,
    Fuel,
    /// A type parameter of the declaration being verified.
    Param(String),
    /// Monomorphic instance of a datatype.
    Data(String, Vec<Sort>),
    Seq(Box<Sort>),
    /// Element → multiplicity.
    Multiset(Box<Sort>),
    /// Contents of one array: index → element.
    Row(Box<Sort>),
    /// All arrays of one element sort: reference → row.
    Heap(Box<Sort>),
}

impl Sort {
    /// Compact name used inside mangled symbols, e.g. `List<Int>`.
    pub fn mangle(&self) -> String {
        match self {
            Sort::Int => "Int".into(),
            Sort::Bool => "Bool".into(),
            Sort::Ref => "Ref".into(),
            Sort::Fuel => "Fuel".into(),
            Sort::Param(n) => format!("@{n}"),
            Sort::Data(n, args) if args.is_empty() => n.clone(),
            Sort::Data(n, args) => {
                let a: Vec<String> = args.iter().map(Sort::mangle).collect();
                format!("{n}<{}>", a.join(","))
            }
            Sort::Seq(e) => format!("Seq<{}>", e.mangle()),
            Sort::Multiset(e) => format!("Multiset<{}>", e.mangle()),
            Sort::Row(e) => format!("Row<{}>", e.mangle()),
            Sort::Heap(e) => format!("Heap<{}>", e.mangle()),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mangle())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Neg,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Implies,
    Ite,
    Select,
    Store,
}

/// Non-builtin function symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fun {
    /// User function instance. Heap arguments come first, one per element
    /// sort in `heaps`.
    User {
        name: String,
        targs: Vec<Sort>,
        heaps: Vec<Sort>,
        result: Sort,
    },
    Ctor { name: String, dt: Sort },
    /// Destructor `field` of constructor `ctor`.
    Field {
        ctor: String,
        field: String,
        dt: Sort,
        result: Sort,
    },
    IsCtor { name: String, dt: Sort },
    /// Array length; independent of the heap.
    Len,
    SeqLen(Sort),
    SeqAt(Sort),
    /// `row[lo..hi]` as a sequence.
    SeqOfRow(Sort),
    /// `s[lo..hi]`.
    SeqSub(Sort),
    MultisetOf(Sort),
    Rank(Sort),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Bool(bool),
    Null,
    /// Free constant of the obligation (program variable version, heap
    /// version, havocked value).
    Const(String, Sort),
    /// Variable bound by an enclosing quantifier.
    Bound(String, Sort),
    Op(Op, Vec<Term>),
    App(Fun, Vec<Term>),
    /// Universally quantified body, with optional patterns.
    Forall(Vec<(String, Sort)>, Vec<Vec<Term>>, Box<Term>),
}

pub fn int(n: i64) -> Term {
    Term::Int(n)
}

pub fn op(o: Op, args: Vec<Term>) -> Term {
    Term::Op(o, args)
}

pub fn eq(a: Term, b: Term) -> Term {
    op(Op::Eq, vec![a, b])
}

pub fn not(a: Term) -> Term {
    match a {
        Term::Bool(b) => Term::Bool(!b),
        Term::Op(Op::Not, mut v) => v.pop().expect("not arity"),
        a => op(Op::Not, vec![a]),
    }
}

pub fn and(parts: Vec<Term>) -> Term {
    let mut v: Vec<Term> = Vec::new();
    for p in parts {
        match p {
            Term::Bool(true) => {}
            Term::Op(Op::And, inner) => v.extend(inner),
            p => v.push(p),
        }
    }
    match v.len() {
        0 => Term::Bool(true),
        1 => v.pop().expect("len 1"),
        _ => op(Op::And, v),
    }
}

pub fn or(parts: Vec<Term>) -> Term {
    let mut v: Vec<Term> = Vec::new();
    for p in parts {
        match p {
            Term::Bool(false) => {}
            Term::Op(Op::Or, inner) => v.extend(inner),
            p => v.push(p),
        }
    }
    match v.len() {
        0 => Term::Bool(false),
        1 => v.pop().expect("len 1"),
        _ => op(Op::Or, v),
    }
}

pub fn implies(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Bool(true), _) => b,
        (Term::Bool(false), _) | (_, Term::Bool(true)) => Term::Bool(true),
        _ => op(Op::Implies, vec![a, b]),
    }
}

pub fn lt(a: Term, b: Term) -> Term {
    op(Op::Lt, vec![a, b])
}

pub fn le(a: Term, b: Term) -> Term {
    op(Op::Le, vec![a, b])
}

pub fn add(a: Term, b: Term) -> Term {
    op(Op::Add, vec![a, b])
}

pub fn sub(a: Term, b: Term) -> Term {
    op(Op::Sub, vec![a, b])
}

/// `a[i]`, reading through a store at the same index.
pub fn select(a: Term, i: Term) -> Term {
    if let Term::Op(Op::Store, args) = &a {
        if args[1] == i {
            return args[2].clone();
        }
    }
    op(Op::Select, vec![a, i])
}

pub fn store(a: Term, i: Term, v: Term) -> Term {
    op(Op::Store, vec![a, i, v])
}

pub fn ite(c: Term, t: Term, e: Term) -> Term {
    op(Op::Ite, vec![c, t, e])
}

pub fn forall(vars: Vec<(String, Sort)>, patterns: Vec<Vec<Term>>, body: Term) -> Term {
    if vars.is_empty() {
        body
    } else {
        Term::Forall(vars, patterns, Box::new(body))
    }
}

impl Term {
    pub fn app(f: Fun, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    /// Visits every subterm, outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Op(_, args) | Term::App(_, args) => args.iter().for_each(|a| a.walk(f)),
            Term::Forall(_, pats, body) => {
                pats.iter().flatten().for_each(|p| p.walk(f));
                body.walk(f);
            }
            _ => {}
        }
    }

    /// Free constants with their sorts.
    pub fn consts(&self, out: &mut BTreeMap<String, Sort>) {
        self.walk(&mut |t| {
            if let Term::Const(n, s) = t {
                out.insert(n.clone(), s.clone());
            }
        });
    }

    pub fn has_quantifier(&self) -> bool {
        let mut q = false;
        self.walk(&mut |t| q |= matches!(t, Term::Forall(..)));
        q
    }

    /// Replaces constants according to `m`.
    pub fn subst_consts(&self, m: &BTreeMap<String, Term>) -> Term {
        self.map(&mut |t| match t {
            Term::Const(n, _) => m.get(n).cloned(),
            _ => None,
        })
    }

    /// Rebuilds the term bottom-up, replacing any subterm for which `f`
    /// returns `Some` (the replacement is not revisited).
    pub fn map(&self, f: &mut dyn FnMut(&Term) -> Option<Term>) -> Term {
        if let Some(r) = f(self) {
            return r;
        }
        match self {
            Term::Op(o, args) => Term::Op(*o, args.iter().map(|a| a.map(f)).collect()),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map(f)).collect()),
            Term::Forall(vs, pats, body) => Term::Forall(
                vs.clone(),
                pats.iter()
                    .map(|p| p.iter().map(|t| t.map(f)).collect())
                    .collect(),
                Box::new(body.map(f)),
            ),
            t => t.clone(),
        }
    }
}
