// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser.
//!
//! Precedence, loosest first: `<==>`, `==>` (right) / `<==` (left), `||`,
//! `&&`, relational (with chaining), additive, multiplicative, unary,
//! postfix. Spec clauses may be terminated by `;` or by the next keyword.

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use crate::diagnostics::{Diagnostic, FrontKind};
use crate::span::SourceSpan;
use std::sync::Arc;

type PResult<T> = Result<T, Diagnostic>;

pub fn parse(text: &str, file: &str) -> Result<Program, Vec<Diagnostic>> {
    let file: Arc<str> = Arc::from(file);
    let toks = lex(text, &file).map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0 };
    let mut decls = Vec::new();
    let mut errors = Vec::new();
    while !p.at_eof() {
        let start = p.pos;
        match p.decl() {
            Ok(d) => decls.push(d),
            Err(e) => {
                errors.push(e);
                // Resynchronise at the next declaration keyword.
                if p.pos == start {
                    p.pos += 1;
                }
                while !p.at_eof() && !p.at_decl_start() {
                    p.pos += 1;
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(Program { decls })
    } else {
        Err(errors)
    }
}

/// Parses a single expression; used by tests and the documentation.
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let file: Arc<str> = Arc::from("<expr>");
    let toks = lex(text, &file)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.err("end of expression"));
    }
    Ok(e)
}

/// Parses a statement list (without surrounding braces).
pub fn parse_stmts(text: &str) -> Result<Block, Diagnostic> {
    let file: Arc<str> = Arc::from("<stmts>");
    let toks = lex(text, &file)?;
    let mut p = Parser { toks, pos: 0 };
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.stmt()?);
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span.clone()
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn at_decl_start(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Kw("method" | "function" | "predicate" | "lemma" | "ghost" | "datatype")
        )
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, expected: &str) -> Diagnostic {
        let found = match self.peek() {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Kw(k) => format!("keyword '{k}'"),
            Tok::Sym(s) => format!("'{s}'"),
            Tok::Eof => "end of input".to_string(),
        };
        Diagnostic::error(
            self.span(),
            FrontKind::Syntax,
            format!("expected {expected}, found {found}"),
        )
    }

    fn expect_sym(&mut self, s: &str) -> PResult<SourceSpan> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.err(&format!("'{s}'")))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.err("identifier")),
        }
    }

    // ---- declarations ----

    fn decl(&mut self) -> PResult<Decl> {
        let ghost = self.eat_kw("ghost");
        match self.peek() {
            Tok::Kw("method") | Tok::Kw("lemma") => self.method(ghost).map(Decl::Method),
            Tok::Kw("function") | Tok::Kw("predicate") => self.function().map(Decl::Function),
            Tok::Kw("datatype") if !ghost => self.datatype().map(Decl::Datatype),
            _ => Err(self.err("declaration")),
        }
    }

    fn type_params(&mut self) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if self.eat_sym("<") {
            loop {
                out.push(self.ident()?.0);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(">")?;
        }
        Ok(out)
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            loop {
                let (name, span) = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                out.push(Param { name, ty, span });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn ty(&mut self) -> PResult<Type> {
        let t = self.bump();
        let one_arg = |p: &mut Parser| -> PResult<Type> {
            p.expect_sym("<")?;
            let t = p.ty()?;
            p.expect_sym(">")?;
            Ok(t)
        };
        match t.tok {
            Tok::Kw("int") | Tok::Kw("nat") => Ok(Type::Int),
            Tok::Kw("bool") => Ok(Type::Bool),
            Tok::Kw("array") => Ok(Type::Array(Box::new(one_arg(self)?))),
            Tok::Kw("seq") => Ok(Type::Seq(Box::new(one_arg(self)?))),
            Tok::Kw("multiset") => Ok(Type::Multiset(Box::new(one_arg(self)?))),
            Tok::Ident(name) => {
                let mut args = Vec::new();
                if self.eat_sym("<") {
                    loop {
                        args.push(self.ty()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(">")?;
                }
                Ok(Type::Named(name, args))
            }
            _ => {
                self.pos -= 1;
                Err(self.err("type"))
            }
        }
    }

    fn expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut out = vec![self.expr()?];
        while self.eat_sym(",") {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn method(&mut self, ghost: bool) -> PResult<Method> {
        let is_lemma = self.is_kw("lemma");
        self.bump();
        let (name, span) = self.ident()?;
        let type_params = self.type_params()?;
        let ins = self.params()?;
        let outs = if self.eat_kw("returns") {
            self.params()?
        } else {
            Vec::new()
        };
        let mut m = Method {
            name,
            type_params,
            ins,
            outs,
            requires: Vec::new(),
            ensures: Vec::new(),
            modifies: Vec::new(),
            decreases: None,
            body: None,
            is_lemma,
            is_ghost: ghost,
            span,
        };
        loop {
            if self.eat_kw("requires") {
                m.requires.push(self.expr()?);
            } else if self.eat_kw("ensures") {
                m.ensures.push(self.expr()?);
            } else if self.eat_kw("modifies") {
                m.modifies.extend(self.expr_list()?);
            } else if self.eat_kw("decreases") {
                m.decreases = Some(self.expr_list()?);
            } else {
                break;
            }
            self.eat_sym(";");
        }
        if self.is_sym("{") {
            m.body = Some(self.block()?);
        }
        Ok(m)
    }

    fn function(&mut self) -> PResult<Function> {
        let is_predicate = self.is_kw("predicate");
        self.bump();
        let is_compiled = self.eat_kw("method");
        let (name, span) = self.ident()?;
        let type_params = self.type_params()?;
        let params = self.params()?;
        let result = if is_predicate {
            if self.eat_sym(":") {
                self.ty()?
            } else {
                Type::Bool
            }
        } else {
            self.expect_sym(":")?;
            self.ty()?
        };
        let mut f = Function {
            name,
            type_params,
            params,
            result,
            requires: Vec::new(),
            reads: Vec::new(),
            decreases: None,
            body: None,
            is_predicate,
            is_compiled,
            span,
        };
        loop {
            if self.eat_kw("requires") {
                f.requires.push(self.expr()?);
            } else if self.eat_kw("reads") {
                f.reads.extend(self.expr_list()?);
            } else if self.eat_kw("decreases") {
                f.decreases = Some(self.expr_list()?);
            } else {
                break;
            }
            self.eat_sym(";");
        }
        if self.eat_sym("{") {
            f.body = Some(self.expr()?);
            self.expect_sym("}")?;
        }
        Ok(f)
    }

    fn datatype(&mut self) -> PResult<Datatype> {
        self.bump();
        let (name, span) = self.ident()?;
        let type_params = self.type_params()?;
        self.expect_sym("=")?;
        let mut ctors = Vec::new();
        loop {
            let (cname, cspan) = self.ident()?;
            let fields = if self.is_sym("(") {
                self.params()?
            } else {
                Vec::new()
            };
            ctors.push(Constructor {
                name: cname,
                fields,
                span: cspan,
            });
            if !self.eat_sym("|") {
                break;
            }
        }
        self.eat_sym(";");
        Ok(Datatype {
            name,
            type_params,
            ctors,
            span,
        })
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<Block> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.is_sym("}") {
            if self.at_eof() {
                return Err(self.err("'}'"));
            }
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    /// Statement terminator: `;`, or nothing right before a closing brace.
    fn terminator(&mut self) -> PResult<()> {
        if self.eat_sym(";") || self.is_sym("}") || self.is_kw("case") {
            Ok(())
        } else {
            Err(self.err("';'"))
        }
    }

    fn rhs(&mut self) -> PResult<Rhs> {
        if self.eat_kw("new") {
            let elem = self.ty()?;
            self.expect_sym("[")?;
            let len = self.expr()?;
            self.expect_sym("]")?;
            Ok(Rhs::ArrayAlloc { elem, len })
        } else {
            Ok(Rhs::Expr(self.expr()?))
        }
    }

    fn rhs_list(&mut self) -> PResult<Vec<Rhs>> {
        let mut out = vec![self.rhs()?];
        while self.eat_sym(",") {
            out.push(self.rhs()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Kw("var") | Tok::Kw("ghost") => {
                let ghost = self.eat_kw("ghost");
                if !self.eat_kw("var") {
                    return Err(self.err("'var'"));
                }
                let mut decls = Vec::new();
                loop {
                    let (name, span) = self.ident()?;
                    let ty = if self.eat_sym(":") {
                        Some(self.ty()?)
                    } else {
                        None
                    };
                    decls.push(LocalDecl { name, ty, span });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                let rhs = if self.eat_sym(":=") {
                    self.rhs_list()?
                } else {
                    Vec::new()
                };
                self.terminator()?;
                StmtKind::VarDecl { decls, ghost, rhs }
            }
            Tok::Kw("if") => {
                self.bump();
                let cond = self.expr()?;
                let then = self.block()?;
                let els = if self.eat_kw("else") {
                    if self.is_kw("if") {
                        Some(vec![self.stmt()?])
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                StmtKind::If { cond, then, els }
            }
            Tok::Kw("while") => {
                self.bump();
                let guard = self.expr()?;
                let mut invariants = Vec::new();
                let mut decreases = None;
                loop {
                    if self.eat_kw("invariant") {
                        invariants.push(self.expr()?);
                    } else if self.eat_kw("decreases") {
                        decreases = Some(self.expr_list()?);
                    } else {
                        break;
                    }
                    self.eat_sym(";");
                }
                let body = self.block()?;
                StmtKind::While {
                    guard,
                    invariants,
                    decreases,
                    body,
                }
            }
            Tok::Kw("assert") => {
                self.bump();
                let e = self.expr()?;
                self.terminator()?;
                StmtKind::Assert(e)
            }
            Tok::Kw("assume") => {
                self.bump();
                let e = self.expr()?;
                self.terminator()?;
                StmtKind::Assume(e)
            }
            Tok::Kw("calc") => self.calc()?,
            Tok::Kw("match") => self.match_stmt()?,
            Tok::Sym("{") => StmtKind::Block(self.block()?),
            _ => {
                let first = self.expr()?;
                if self.is_sym(",") || self.is_sym(":=") {
                    let mut lhs = vec![first];
                    while self.eat_sym(",") {
                        lhs.push(self.expr()?);
                    }
                    self.expect_sym(":=")?;
                    let rhs = self.rhs_list()?;
                    self.terminator()?;
                    StmtKind::Assign { lhs, rhs }
                } else if let ExprKind::FnCall(callee, args) = first.kind {
                    self.terminator()?;
                    StmtKind::Call {
                        targets: Vec::new(),
                        callee,
                        args,
                    }
                } else {
                    return Err(Diagnostic::error(
                        first.span,
                        FrontKind::Syntax,
                        "expected a statement",
                    ));
                }
            }
        };
        Ok(Stmt {
            kind,
            span: start,
        })
    }

    fn calc_op(&mut self) -> Option<CalcOp> {
        let op = match self.peek() {
            Tok::Sym("==") => CalcOp::Eq,
            Tok::Sym("!=") => CalcOp::Ne,
            Tok::Sym("<") => CalcOp::Lt,
            Tok::Sym("<=") => CalcOp::Le,
            Tok::Sym(">") => CalcOp::Gt,
            Tok::Sym(">=") => CalcOp::Ge,
            Tok::Sym("==>") => CalcOp::Implies,
            Tok::Sym("<==") => CalcOp::Explies,
            Tok::Sym("<==>") => CalcOp::Iff,
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    fn calc(&mut self) -> PResult<StmtKind> {
        self.bump();
        self.expect_sym("{")?;
        let mut lines = Vec::new();
        let mut ops = Vec::new();
        let mut hints = Vec::new();
        if !self.is_sym("}") {
            lines.push(self.expr()?);
            self.expect_sym(";")?;
            while !self.is_sym("}") {
                let op = self.calc_op().unwrap_or(CalcOp::Eq);
                let hint = if self.is_sym("{") {
                    self.block()?
                } else {
                    Vec::new()
                };
                lines.push(self.expr()?);
                self.expect_sym(";")?;
                ops.push(op);
                hints.push(hint);
            }
        }
        self.expect_sym("}")?;
        Ok(StmtKind::Calc { lines, ops, hints })
    }

    fn match_stmt(&mut self) -> PResult<StmtKind> {
        self.bump();
        let scrutinee = self.expr()?;
        let braced = self.eat_sym("{");
        let mut cases = Vec::new();
        while self.is_kw("case") {
            let span = self.bump().span;
            let (ctor, _) = self.ident()?;
            let mut binders = Vec::new();
            if self.eat_sym("(") {
                if !self.is_sym(")") {
                    loop {
                        let (name, span) = self.ident()?;
                        binders.push(LocalDecl {
                            name,
                            ty: None,
                            span,
                        });
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
            }
            self.expect_sym("=>")?;
            let mut body = Vec::new();
            while !self.is_kw("case") && !self.is_sym("}") && !self.at_eof() {
                body.push(self.stmt()?);
            }
            cases.push(MatchCase {
                ctor,
                binders,
                body,
                span,
            });
        }
        if braced {
            self.expect_sym("}")?;
        }
        if cases.is_empty() {
            return Err(self.err("'case'"));
        }
        Ok(StmtKind::Match { scrutinee, cases })
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.implies()?;
        while self.is_sym("<==>") {
            self.bump();
            let rhs = self.implies()?;
            lhs = bin(BinOp::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.eat_sym("==>") {
            let rhs = self.implies()?;
            return Ok(bin(BinOp::Implies, lhs, rhs));
        }
        let mut lhs = lhs;
        while self.eat_sym("<==") {
            let rhs = self.or()?;
            lhs = bin(BinOp::Explies, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.eat_sym("||") {
            let rhs = self.and()?;
            lhs = bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.relation()?;
        while self.eat_sym("&&") {
            let rhs = self.relation()?;
            lhs = bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn relop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return None,
        })
    }

    fn relation(&mut self) -> PResult<Expr> {
        let first = self.additive()?;
        let mut operands = vec![first];
        let mut ops = Vec::new();
        while let Some(op) = self.relop() {
            self.bump();
            ops.push(op);
            operands.push(self.additive()?);
        }
        Ok(match ops.len() {
            0 => operands.pop().unwrap(),
            1 => {
                let rhs = operands.pop().unwrap();
                let lhs = operands.pop().unwrap();
                bin(ops[0], lhs, rhs)
            }
            _ => {
                let span = operands[0].span.to(&operands[operands.len() - 1].span);
                Expr::new(ExprKind::Chain(operands, ops), span)
            }
        })
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                Tok::Sym("%") => BinOp::Mod,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.eat_sym("!") {
            let e = self.unary()?;
            let span = start.to(&e.span);
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), span));
        }
        if self.eat_sym("-") {
            let e = self.unary()?;
            let span = start.to(&e.span);
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_sym("[") {
                if self.eat_sym("..") {
                    let hi = if self.is_sym("]") {
                        None
                    } else {
                        Some(Box::new(self.expr()?))
                    };
                    let end = self.expect_sym("]")?;
                    let span = e.span.to(&end);
                    e = Expr::new(ExprKind::Slice(Box::new(e), None, hi), span);
                } else {
                    let idx = self.expr()?;
                    if self.eat_sym("..") {
                        let hi = if self.is_sym("]") {
                            None
                        } else {
                            Some(Box::new(self.expr()?))
                        };
                        let end = self.expect_sym("]")?;
                        let span = e.span.to(&end);
                        e = Expr::new(
                            ExprKind::Slice(Box::new(e), Some(Box::new(idx)), hi),
                            span,
                        );
                    } else {
                        let end = self.expect_sym("]")?;
                        let span = e.span.to(&end);
                        e = Expr::new(ExprKind::Index(Box::new(e), Box::new(idx)), span);
                    }
                }
            } else if self.is_sym(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
                self.bump();
                let (field, fspan) = self.ident()?;
                let span = e.span.to(&fspan);
                e = if field == "Length" {
                    Expr::new(ExprKind::Length(Box::new(e)), span)
                } else {
                    Expr::new(ExprKind::Field(Box::new(e), field), span)
                };
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            out = self.expr_list()?;
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::new(ExprKind::IntLit(n), start))
            }
            Tok::Kw("true") => {
                self.bump();
                Ok(Expr::new(ExprKind::BoolLit(true), start))
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(Expr::new(ExprKind::BoolLit(false), start))
            }
            Tok::Kw("null") => {
                self.bump();
                Ok(Expr::new(ExprKind::Null, start))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.is_sym("(") {
                    let args = self.args()?;
                    let span = start.to(&self.prev_span());
                    Ok(Expr::new(ExprKind::FnCall(name, args), span))
                } else {
                    Ok(Expr::new(ExprKind::Var(name), start))
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let mut e = self.expr()?;
                let end = self.expect_sym(")")?;
                e.span = start.to(&end);
                Ok(e)
            }
            Tok::Kw("old") => {
                self.bump();
                self.expect_sym("(")?;
                let e = self.expr()?;
                let end = self.expect_sym(")")?;
                Ok(Expr::new(ExprKind::Old(Box::new(e)), start.to(&end)))
            }
            Tok::Kw("multiset") => {
                self.bump();
                self.expect_sym("(")?;
                let e = self.expr()?;
                let end = self.expect_sym(")")?;
                Ok(Expr::new(ExprKind::MultisetOf(Box::new(e)), start.to(&end)))
            }
            Tok::Kw("forall") => {
                self.bump();
                let mut vars = Vec::new();
                loop {
                    let (name, _) = self.ident()?;
                    let ty = if self.eat_sym(":") {
                        Some(self.ty()?)
                    } else {
                        None
                    };
                    vars.push(BoundVar { name, ty });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("::")?;
                let body = self.expr()?;
                let span = start.to(&body.span);
                Ok(Expr::new(ExprKind::Forall(vars, Box::new(body)), span))
            }
            Tok::Kw("if") => {
                self.bump();
                let c = self.expr()?;
                if !self.eat_kw("then") {
                    return Err(self.err("'then'"));
                }
                let t = self.expr()?;
                if !self.eat_kw("else") {
                    return Err(self.err("'else'"));
                }
                let e = self.expr()?;
                let span = start.to(&e.span);
                Ok(Expr::new(
                    ExprKind::Ite(Box::new(c), Box::new(t), Box::new(e)),
                    span,
                ))
            }
            _ => Err(self.err("expression")),
        }
    }
}

fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(&rhs.span);
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        assert_eq!(parse("", "e.dfy").unwrap().decls.len(), 0);
    }

    #[test]
    fn implication_is_right_associative() {
        let e = parse_expr("a ==> b ==> c").unwrap();
        match e.kind {
            ExprKind::Binary(BinOp::Implies, l, r) => {
                assert!(matches!(l.kind, ExprKind::Var(_)));
                assert!(matches!(r.kind, ExprKind::Binary(BinOp::Implies, _, _)));
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn chained_relations() {
        let e = parse_expr("0 <= i < j < a.Length").unwrap();
        match e.kind {
            ExprKind::Chain(es, ops) => {
                assert_eq!(es.len(), 4);
                assert_eq!(ops, vec![BinOp::Le, BinOp::Lt, BinOp::Lt]);
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn slices() {
        assert!(matches!(
            parse_expr("a[..]").unwrap().kind,
            ExprKind::Slice(_, None, None)
        ));
        assert!(matches!(
            parse_expr("a[1..n]").unwrap().kind,
            ExprKind::Slice(_, Some(_), Some(_))
        ));
    }

    #[test]
    fn multi_assignment() {
        let b = parse_stmts("i, t1, t2 := i+1, 8*t1, 3*t2;").unwrap();
        match &b[0].kind {
            StmtKind::Assign { lhs, rhs } => {
                assert_eq!(lhs.len(), 3);
                assert_eq!(rhs.len(), 3);
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn recovers_after_bad_declaration() {
        let errs = parse("method A( { }\nmethod B() { }\nfunction C(: int", "r.dfy").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].span.line, 1);
        assert_eq!(errs[1].span.line, 3);
    }

    #[test]
    fn syntax_error_has_span() {
        let errs = parse("method M() {\n  x := ;\n}", "s.dfy").unwrap_err();
        assert_eq!(errs[0].span.line, 2);
        assert_eq!(errs[0].span.col, 8);
    }
}
