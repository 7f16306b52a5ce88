// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pretty printer. Output re-parses to the same tree; parentheses are
//! inserted only where precedence demands them.

use super::ast::*;
use std::fmt::Write;

const P_QUANT: u8 = 0;
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_REL: u8 = 5;
const P_ADD: u8 = 6;
const P_MUL: u8 = 7;
const P_UNARY: u8 = 8;
const P_POSTFIX: u8 = 9;
const P_ATOM: u8 = 10;

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Iff => P_IFF,
        BinOp::Implies | BinOp::Explies => P_IMP,
        BinOp::Or => P_OR,
        BinOp::And => P_AND,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => P_REL,
        BinOp::Add | BinOp::Sub => P_ADD,
        BinOp::Mul | BinOp::Div | BinOp::Mod => P_MUL,
    }
}

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::IntLit(n) if *n < 0 => P_UNARY,
        ExprKind::IntLit(_)
        | ExprKind::BoolLit(_)
        | ExprKind::Null
        | ExprKind::Var(_)
        | ExprKind::FnCall(..)
        | ExprKind::CtorCall(..)
        | ExprKind::Old(_)
        | ExprKind::MultisetOf(_) => P_ATOM,
        ExprKind::Index(..) | ExprKind::Length(_) | ExprKind::Slice(..) | ExprKind::Field(..) => {
            P_POSTFIX
        }
        ExprKind::Unary(..) => P_UNARY,
        ExprKind::Binary(op, ..) => binop_prec(*op),
        ExprKind::Chain(..) => P_REL,
        ExprKind::Forall(..) | ExprKind::Ite(..) => P_QUANT,
    }
}

fn child(out: &mut String, e: &Expr, paren: bool) {
    if paren {
        out.push('(');
        expr_into(out, e);
        out.push(')');
    } else {
        expr_into(out, e);
    }
}

fn list(out: &mut String, es: &[Expr]) {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr_into(out, e);
    }
}

fn is_binop(e: &Expr, op: BinOp) -> bool {
    matches!(&e.kind, ExprKind::Binary(o, ..) if *o == op)
}

fn expr_into(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::IntLit(n) => write!(out, "{n}").unwrap(),
        ExprKind::BoolLit(b) => write!(out, "{b}").unwrap(),
        ExprKind::Null => out.push_str("null"),
        ExprKind::Var(v) => out.push_str(v),
        ExprKind::Binary(op, l, r) => {
            let p = binop_prec(*op);
            let (lp, rp) = match op {
                BinOp::Implies => (prec(l) <= p, prec(r) < p || (prec(r) == p && !is_binop(r, *op))),
                BinOp::Explies => (prec(l) < p || (prec(l) == p && !is_binop(l, *op)), prec(r) <= p),
                _ if op.is_relational() => (prec(l) <= p, prec(r) <= p),
                _ => (prec(l) < p, prec(r) <= p),
            };
            child(out, l, lp);
            write!(out, " {} ", op.as_str()).unwrap();
            child(out, r, rp);
        }
        ExprKind::Chain(es, ops) => {
            for (i, x) in es.iter().enumerate() {
                if i > 0 {
                    write!(out, " {} ", ops[i - 1].as_str()).unwrap();
                }
                child(out, x, prec(x) <= P_REL);
            }
        }
        ExprKind::Unary(op, x) => {
            out.push(match op {
                UnOp::Not => '!',
                UnOp::Neg => '-',
            });
            child(out, x, prec(x) < P_UNARY);
        }
        ExprKind::FnCall(f, args) | ExprKind::CtorCall(f, args) => {
            out.push_str(f);
            // Nullary constructors are written without parentheses.
            if !(matches!(e.kind, ExprKind::CtorCall(..)) && args.is_empty()) {
                out.push('(');
                list(out, args);
                out.push(')');
            }
        }
        ExprKind::Index(a, i) => {
            child(out, a, prec(a) < P_POSTFIX);
            out.push('[');
            expr_into(out, i);
            out.push(']');
        }
        ExprKind::Length(a) => {
            child(out, a, prec(a) < P_POSTFIX);
            out.push_str(".Length");
        }
        ExprKind::Field(a, f) => {
            child(out, a, prec(a) < P_POSTFIX);
            out.push('.');
            out.push_str(f);
        }
        ExprKind::Slice(a, lo, hi) => {
            child(out, a, prec(a) < P_POSTFIX);
            out.push('[');
            if let Some(lo) = lo {
                expr_into(out, lo);
            }
            out.push_str("..");
            if let Some(hi) = hi {
                expr_into(out, hi);
            }
            out.push(']');
        }
        ExprKind::MultisetOf(x) => {
            out.push_str("multiset(");
            expr_into(out, x);
            out.push(')');
        }
        ExprKind::Old(x) => {
            out.push_str("old(");
            expr_into(out, x);
            out.push(')');
        }
        ExprKind::Forall(vs, body) => {
            out.push_str("forall ");
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&v.name);
                if let Some(t) = &v.ty {
                    write!(out, ": {t}").unwrap();
                }
            }
            out.push_str(" :: ");
            expr_into(out, body);
        }
        ExprKind::Ite(c, t, f) => {
            out.push_str("if ");
            expr_into(out, c);
            out.push_str(" then ");
            expr_into(out, t);
            out.push_str(" else ");
            expr_into(out, f);
        }
    }
}

/// Renders an expression as source text.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    expr_into(&mut s, e);
    s
}

fn indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn rhs_into(out: &mut String, r: &Rhs) {
    match r {
        Rhs::Expr(e) => expr_into(out, e),
        Rhs::ArrayAlloc { elem, len } => {
            write!(out, "new {elem}[").unwrap();
            expr_into(out, len);
            out.push(']');
        }
    }
}

fn rhs_list(out: &mut String, rs: &[Rhs]) {
    for (i, r) in rs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        rhs_into(out, r);
    }
}

fn block_into(out: &mut String, b: &Block, level: usize) {
    out.push_str("{\n");
    for s in b {
        stmt_into(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn stmt_into(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::VarDecl { decls, ghost, rhs } => {
            if *ghost {
                out.push_str("ghost ");
            }
            out.push_str("var ");
            for (i, d) in decls.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&d.name);
                if let Some(t) = &d.ty {
                    write!(out, ": {t}").unwrap();
                }
            }
            if !rhs.is_empty() {
                out.push_str(" := ");
                rhs_list(out, rhs);
            }
            out.push_str(";\n");
        }
        StmtKind::Assign { lhs, rhs } => {
            list(out, lhs);
            out.push_str(" := ");
            rhs_list(out, rhs);
            out.push_str(";\n");
        }
        StmtKind::Call {
            targets,
            callee,
            args,
        } => {
            if !targets.is_empty() {
                list(out, targets);
                out.push_str(" := ");
            }
            out.push_str(callee);
            out.push('(');
            list(out, args);
            out.push_str(");\n");
        }
        StmtKind::If { cond, then, els } => {
            out.push_str("if ");
            expr_into(out, cond);
            out.push(' ');
            block_into(out, then, level);
            if let Some(els) = els {
                out.push_str(" else ");
                block_into(out, els, level);
            }
            out.push('\n');
        }
        StmtKind::While {
            guard,
            invariants,
            decreases,
            body,
        } => {
            out.push_str("while ");
            expr_into(out, guard);
            out.push('\n');
            for inv in invariants {
                indent(out, level + 1);
                out.push_str("invariant ");
                expr_into(out, inv);
                out.push('\n');
            }
            if let Some(d) = decreases {
                indent(out, level + 1);
                out.push_str("decreases ");
                list(out, d);
                out.push('\n');
            }
            indent(out, level);
            block_into(out, body, level);
            out.push('\n');
        }
        StmtKind::Assert(e) => {
            out.push_str("assert ");
            expr_into(out, e);
            out.push_str(";\n");
        }
        StmtKind::Assume(e) => {
            out.push_str("assume ");
            expr_into(out, e);
            out.push_str(";\n");
        }
        StmtKind::Calc { lines, ops, hints } => {
            out.push_str("calc {\n");
            for (i, line) in lines.iter().enumerate() {
                if i > 0 {
                    indent(out, level + 1);
                    out.push_str(ops[i - 1].as_str());
                    if !hints[i - 1].is_empty() {
                        out.push(' ');
                        block_into(out, &hints[i - 1], level + 1);
                    }
                    out.push('\n');
                }
                indent(out, level + 1);
                expr_into(out, line);
                out.push_str(";\n");
            }
            indent(out, level);
            out.push_str("}\n");
        }
        StmtKind::Match { scrutinee, cases } => {
            out.push_str("match ");
            expr_into(out, scrutinee);
            out.push_str(" {\n");
            for c in cases {
                indent(out, level + 1);
                write!(out, "case {}", c.ctor).unwrap();
                if !c.binders.is_empty() {
                    let names: Vec<&str> = c.binders.iter().map(|b| b.name.as_str()).collect();
                    write!(out, "({})", names.join(", ")).unwrap();
                }
                out.push_str(" =>\n");
                for s in &c.body {
                    stmt_into(out, s, level + 2);
                }
            }
            indent(out, level);
            out.push_str("}\n");
        }
        StmtKind::Block(b) => {
            block_into(out, b, level);
            out.push('\n');
        }
    }
}

pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    stmt_into(&mut out, s, 0);
    out
}

fn params_into(out: &mut String, ps: &[Param]) {
    out.push('(');
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{}: {}", p.name, p.ty).unwrap();
    }
    out.push(')');
}

fn type_params_into(out: &mut String, tps: &[String]) {
    if !tps.is_empty() {
        write!(out, "<{}>", tps.join(", ")).unwrap();
    }
}

fn clause(out: &mut String, kw: &str, es: &[Expr]) {
    out.push_str("  ");
    out.push_str(kw);
    out.push(' ');
    list(out, es);
    out.push('\n');
}

pub fn decl_to_string(d: &Decl) -> String {
    let mut out = String::new();
    match d {
        Decl::Method(m) => {
            if m.is_lemma {
                out.push_str("lemma ");
            } else {
                if m.is_ghost {
                    out.push_str("ghost ");
                }
                out.push_str("method ");
            }
            out.push_str(&m.name);
            type_params_into(&mut out, &m.type_params);
            params_into(&mut out, &m.ins);
            if !m.outs.is_empty() {
                out.push_str(" returns ");
                params_into(&mut out, &m.outs);
            }
            out.push('\n');
            for r in &m.requires {
                clause(&mut out, "requires", std::slice::from_ref(r));
            }
            if !m.modifies.is_empty() {
                clause(&mut out, "modifies", &m.modifies);
            }
            for e in &m.ensures {
                clause(&mut out, "ensures", std::slice::from_ref(e));
            }
            if let Some(dec) = &m.decreases {
                clause(&mut out, "decreases", dec);
            }
            if let Some(body) = &m.body {
                block_into(&mut out, body, 0);
                out.push('\n');
            }
        }
        Decl::Function(f) => {
            out.push_str(if f.is_predicate { "predicate " } else { "function " });
            if f.is_compiled {
                out.push_str("method ");
            }
            out.push_str(&f.name);
            type_params_into(&mut out, &f.type_params);
            params_into(&mut out, &f.params);
            if !f.is_predicate {
                write!(out, ": {}", f.result).unwrap();
            }
            out.push('\n');
            for r in &f.requires {
                clause(&mut out, "requires", std::slice::from_ref(r));
            }
            if !f.reads.is_empty() {
                clause(&mut out, "reads", &f.reads);
            }
            if let Some(dec) = &f.decreases {
                clause(&mut out, "decreases", dec);
            }
            if let Some(body) = &f.body {
                out.push_str("{\n  ");
                expr_into(&mut out, body);
                out.push_str("\n}\n");
            }
        }
        Decl::Datatype(dt) => {
            write!(out, "datatype {}", dt.name).unwrap();
            type_params_into(&mut out, &dt.type_params);
            out.push_str(" = ");
            for (i, c) in dt.ctors.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                out.push_str(&c.name);
                if !c.fields.is_empty() {
                    params_into(&mut out, &c.fields);
                }
            }
            out.push('\n');
        }
    }
    out
}

pub fn program_to_string(p: &Program) -> String {
    let parts: Vec<String> = p.decls.iter().map(decl_to_string).collect();
    parts.join("\n")
}

/// A node that can be rendered as source text.
pub enum Node<'a> {
    Expr(&'a Expr),
    Stmt(&'a Stmt),
    Decl(&'a Decl),
    Program(&'a Program),
}

pub fn pretty_print(node: Node<'_>) -> String {
    match node {
        Node::Expr(e) => expr_to_string(e),
        Node::Stmt(s) => stmt_to_string(s),
        Node::Decl(d) => decl_to_string(d),
        Node::Program(p) => program_to_string(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_expr;

    fn round(s: &str) -> String {
        expr_to_string(&parse_expr(s).unwrap())
    }

    #[test]
    fn ensures_clause() {
        assert_eq!(round("f==factorial(n)"), "f == factorial(n)");
    }

    #[test]
    fn literal() {
        assert_eq!(round("0"), "0");
    }

    #[test]
    fn old_slice() {
        assert_eq!(round("old( a[..] )"), "old(a[..])");
    }

    #[test]
    fn keeps_needed_parens() {
        assert_eq!(round("(a - b) - c"), "a - b - c");
        assert_eq!(round("a - (b - c)"), "a - (b - c)");
        assert_eq!(round("(a ==> b) ==> c"), "(a ==> b) ==> c");
        assert_eq!(round("(x == y) == z"), "(x == y) == z");
        assert_eq!(round("(exp(2,3*k) - exp(3,k)) % 5"), "(exp(2, 3 * k) - exp(3, k)) % 5");
        assert_eq!(round("(if a then b else c) + 1"), "(if a then b else c) + 1");
    }
}
