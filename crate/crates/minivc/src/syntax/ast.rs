// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Span-annotated abstract syntax.
//!
//! The parser leaves `Expr::ty` empty and produces `Type::Named` for every
//! user-written type name; the resolver fills in expression types and rewrites
//! named types into type variables or datatype references.

use crate::span::SourceSpan;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Array(Box<Type>),
    Seq(Box<Type>),
    Multiset(Box<Type>),
    /// A type variable bound by the enclosing declaration.
    TypeVar(String),
    Datatype(String, Vec<Type>),
    /// Unresolved user-written name, produced by the parser only.
    Named(String, Vec<Type>),
    /// Inference placeholder used during resolution.
    Infer(u32),
    /// Type of the `null` literal before it meets an array type.
    Null,
}

impl Type {
    pub fn is_array(&self) -> bool {
        matches!(self, Type::Array(_))
    }

    pub fn elem(&self) -> Option<&Type> {
        match self {
            Type::Array(t) | Type::Seq(t) | Type::Multiset(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn args(f: &mut fmt::Formatter<'_>, args: &[Type]) -> fmt::Result {
            if !args.is_empty() {
                f.write_str("<")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(">")?;
            }
            Ok(())
        }
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Array(t) => write!(f, "array<{t}>"),
            Type::Seq(t) => write!(f, "seq<{t}>"),
            Type::Multiset(t) => write!(f, "multiset<{t}>"),
            Type::TypeVar(n) => f.write_str(n),
            Type::Datatype(n, a) | Type::Named(n, a) => {
                f.write_str(n)?;
                args(f, a)
            }
            Type::Infer(i) => write!(f, "?{i}"),
            Type::Null => f.write_str("null"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Method(Method),
    Function(Function),
    Datatype(Datatype),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Method(m) => &m.name,
            Decl::Function(f) => &f.name,
            Decl::Datatype(d) => &d.name,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            Decl::Method(m) => &m.span,
            Decl::Function(f) => &f.span,
            Decl::Datatype(d) => &d.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Method {
    pub name: String,
    pub type_params: Vec<String>,
    pub ins: Vec<Param>,
    pub outs: Vec<Param>,
    pub requires: Vec<Expr>,
    pub ensures: Vec<Expr>,
    pub modifies: Vec<Expr>,
    pub decreases: Option<Vec<Expr>>,
    pub body: Option<Block>,
    pub is_lemma: bool,
    /// Written `ghost method`; lemmas are always ghost.
    pub is_ghost: bool,
    pub span: SourceSpan,
}

impl Method {
    pub fn ghost(&self) -> bool {
        self.is_lemma || self.is_ghost
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Function {
    pub name: String,
    pub type_params: Vec<String>,
    pub params: Vec<Param>,
    pub result: Type,
    pub requires: Vec<Expr>,
    pub reads: Vec<Expr>,
    pub decreases: Option<Vec<Expr>>,
    pub body: Option<Expr>,
    pub is_predicate: bool,
    /// `function method` / `predicate method`.
    pub is_compiled: bool,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Datatype {
    pub name: String,
    pub type_params: Vec<String>,
    pub ctors: Vec<Constructor>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constructor {
    pub name: String,
    pub fields: Vec<Param>,
    pub span: SourceSpan,
}

pub type Block = Vec<Stmt>;

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalDecl {
    pub name: String,
    pub ty: Option<Type>,
    pub span: SourceSpan,
}

/// Right-hand side of an assignment.
#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    Expr(Expr),
    /// `new T[len]`
    ArrayAlloc { elem: Type, len: Expr },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CalcOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Implies,
    Explies,
    Iff,
}

impl CalcOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CalcOp::Eq => "==",
            CalcOp::Ne => "!=",
            CalcOp::Lt => "<",
            CalcOp::Le => "<=",
            CalcOp::Gt => ">",
            CalcOp::Ge => ">=",
            CalcOp::Implies => "==>",
            CalcOp::Explies => "<==",
            CalcOp::Iff => "<==>",
        }
    }

    pub fn to_binop(self) -> BinOp {
        match self {
            CalcOp::Eq => BinOp::Eq,
            CalcOp::Ne => BinOp::Ne,
            CalcOp::Lt => BinOp::Lt,
            CalcOp::Le => BinOp::Le,
            CalcOp::Gt => BinOp::Gt,
            CalcOp::Ge => BinOp::Ge,
            CalcOp::Implies => BinOp::Implies,
            CalcOp::Explies => BinOp::Explies,
            CalcOp::Iff => BinOp::Iff,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchCase {
    pub ctor: String,
    pub binders: Vec<LocalDecl>,
    pub body: Block,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    VarDecl {
        decls: Vec<LocalDecl>,
        ghost: bool,
        rhs: Vec<Rhs>,
    },
    /// Simultaneous assignment. Targets are variables or array elements.
    Assign {
        lhs: Vec<Expr>,
        rhs: Vec<Rhs>,
    },
    /// Method or lemma call. The parser produces this for bare call
    /// statements; the resolver rewrites `x := M(..)` into it.
    Call {
        targets: Vec<Expr>,
        callee: String,
        args: Vec<Expr>,
    },
    If {
        cond: Expr,
        then: Block,
        els: Option<Block>,
    },
    While {
        guard: Expr,
        invariants: Vec<Expr>,
        decreases: Option<Vec<Expr>>,
        body: Block,
    },
    Assert(Expr),
    Assume(Expr),
    Calc {
        lines: Vec<Expr>,
        ops: Vec<CalcOp>,
        hints: Vec<Block>,
    },
    Match {
        scrutinee: Expr,
        cases: Vec<MatchCase>,
    },
    Block(Block),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
    Explies,
    Iff,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "==>",
            BinOp::Explies => "<==",
            BinOp::Iff => "<==>",
        }
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundVar {
    pub name: String,
    pub ty: Option<Type>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
    /// Filled in by the resolver.
    pub ty: Option<Type>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    IntLit(i64),
    BoolLit(bool),
    Null,
    Var(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Relational chain such as `0 <= i < j < n`, meaning the conjunction of
    /// its adjacent comparisons.
    Chain(Vec<Expr>, Vec<BinOp>),
    Unary(UnOp, Box<Expr>),
    /// Function call (or constructor call before resolution).
    FnCall(String, Vec<Expr>),
    CtorCall(String, Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Length(Box<Expr>),
    /// `a[..]`, `a[lo..]`, `a[..hi]`, `a[lo..hi]`
    Slice(Box<Expr>, Option<Box<Expr>>, Option<Box<Expr>>),
    MultisetOf(Box<Expr>),
    Old(Box<Expr>),
    Forall(Vec<BoundVar>, Box<Expr>),
    /// Destructor access `e.field`.
    Field(Box<Expr>, String),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr {
            kind,
            span,
            ty: None,
        }
    }

    pub fn typed(kind: ExprKind, span: SourceSpan, ty: Type) -> Self {
        Expr {
            kind,
            span,
            ty: Some(ty),
        }
    }

    pub fn ty(&self) -> &Type {
        self.ty.as_ref().unwrap_or(&Type::Int)
    }

    /// Visits every sub-expression, outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::IntLit(_) | ExprKind::BoolLit(_) | ExprKind::Null | ExprKind::Var(_) => {}
            ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            ExprKind::Chain(es, _) | ExprKind::FnCall(_, es) | ExprKind::CtorCall(_, es) => {
                for e in es {
                    e.walk(f);
                }
            }
            ExprKind::Unary(_, a)
            | ExprKind::Length(a)
            | ExprKind::MultisetOf(a)
            | ExprKind::Old(a)
            | ExprKind::Forall(_, a)
            | ExprKind::Field(a, _) => a.walk(f),
            ExprKind::Slice(a, lo, hi) => {
                a.walk(f);
                if let Some(lo) = lo {
                    lo.walk(f);
                }
                if let Some(hi) = hi {
                    hi.walk(f);
                }
            }
            ExprKind::Ite(c, t, e) => {
                c.walk(f);
                t.walk(f);
                e.walk(f);
            }
        }
    }

    /// Free variable names (excluding names bound by quantifiers).
    pub fn free_vars(&self) -> Vec<String> {
        fn go(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match &e.kind {
                ExprKind::Var(v) => {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                ExprKind::Forall(vs, body) => {
                    let n = bound.len();
                    bound.extend(vs.iter().map(|v| v.name.clone()));
                    go(body, bound, out);
                    bound.truncate(n);
                }
                _ => e.for_each_child(&mut |c| go(c, bound, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn for_each_child<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match &self.kind {
            ExprKind::IntLit(_) | ExprKind::BoolLit(_) | ExprKind::Null | ExprKind::Var(_) => {}
            ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => {
                f(a);
                f(b);
            }
            ExprKind::Chain(es, _) | ExprKind::FnCall(_, es) | ExprKind::CtorCall(_, es) => {
                es.iter().for_each(|e| f(e))
            }
            ExprKind::Unary(_, a)
            | ExprKind::Length(a)
            | ExprKind::MultisetOf(a)
            | ExprKind::Old(a)
            | ExprKind::Forall(_, a)
            | ExprKind::Field(a, _) => f(a),
            ExprKind::Slice(a, lo, hi) => {
                f(a);
                if let Some(lo) = lo {
                    f(lo);
                }
                if let Some(hi) = hi {
                    f(hi);
                }
            }
            ExprKind::Ite(c, t, e) => {
                f(c);
                f(t);
                f(e);
            }
        }
    }

    pub fn for_each_child_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        match &mut self.kind {
            ExprKind::IntLit(_) | ExprKind::BoolLit(_) | ExprKind::Null | ExprKind::Var(_) => {}
            ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => {
                f(a);
                f(b);
            }
            ExprKind::Chain(es, _) | ExprKind::FnCall(_, es) | ExprKind::CtorCall(_, es) => {
                es.iter_mut().for_each(|e| f(e))
            }
            ExprKind::Unary(_, a)
            | ExprKind::Length(a)
            | ExprKind::MultisetOf(a)
            | ExprKind::Old(a)
            | ExprKind::Forall(_, a)
            | ExprKind::Field(a, _) => f(a),
            ExprKind::Slice(a, lo, hi) => {
                f(a);
                if let Some(lo) = lo {
                    f(lo);
                }
                if let Some(hi) = hi {
                    f(hi);
                }
            }
            ExprKind::Ite(c, t, e) => {
                f(c);
                f(t);
                f(e);
            }
        }
    }
}

impl Stmt {
    /// Visits this statement and every nested statement.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::If { then, els, .. } => {
                then.iter().for_each(|s| s.walk(f));
                if let Some(els) = els {
                    els.iter().for_each(|s| s.walk(f));
                }
            }
            StmtKind::While { body, .. } | StmtKind::Block(body) => {
                body.iter().for_each(|s| s.walk(f))
            }
            StmtKind::Calc { hints, .. } => hints.iter().flatten().for_each(|s| s.walk(f)),
            StmtKind::Match { cases, .. } => cases
                .iter()
                .flat_map(|c| c.body.iter())
                .for_each(|s| s.walk(f)),
            _ => {}
        }
    }

    /// Expressions appearing directly in this statement (not in nested ones).
    pub fn exprs(&self) -> Vec<&Expr> {
        fn rhs_exprs<'a>(rhs: &'a [Rhs], out: &mut Vec<&'a Expr>) {
            for r in rhs {
                match r {
                    Rhs::Expr(e) => out.push(e),
                    Rhs::ArrayAlloc { len, .. } => out.push(len),
                }
            }
        }
        let mut out = Vec::new();
        match &self.kind {
            StmtKind::VarDecl { rhs, .. } => rhs_exprs(rhs, &mut out),
            StmtKind::Assign { lhs, rhs } => {
                out.extend(lhs.iter());
                rhs_exprs(rhs, &mut out);
            }
            StmtKind::Call { targets, args, .. } => {
                out.extend(targets.iter());
                out.extend(args.iter());
            }
            StmtKind::If { cond, .. } => out.push(cond),
            StmtKind::While {
                guard,
                invariants,
                decreases,
                ..
            } => {
                out.push(guard);
                out.extend(invariants.iter());
                if let Some(d) = decreases {
                    out.extend(d.iter());
                }
            }
            StmtKind::Assert(e) | StmtKind::Assume(e) => out.push(e),
            StmtKind::Calc { lines, .. } => out.extend(lines.iter()),
            StmtKind::Match { scrutinee, .. } => out.push(scrutinee),
            StmtKind::Block(_) => {}
        }
        out
    }
}
