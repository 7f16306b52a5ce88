// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::span::SourceSpan;
use crate::syntax::ast::*;

/// The relation between the first and last line of a calc chain.
pub fn compose(ops: &[CalcOp]) -> CalcOp {
    let mut acc = CalcOp::Eq;
    for &o in ops {
        acc = match (acc, o) {
            (CalcOp::Eq, o) | (o, CalcOp::Eq) => o,
            (CalcOp::Iff, o) | (o, CalcOp::Iff) => o,
            (CalcOp::Lt, CalcOp::Le) | (CalcOp::Le, CalcOp::Lt) => CalcOp::Lt,
            (CalcOp::Gt, CalcOp::Ge) | (CalcOp::Ge, CalcOp::Gt) => CalcOp::Gt,
            (a, b) if a == b && a != CalcOp::Ne => a,
            // The resolver rejects other mixtures.
            (a, _) => a,
        }
    }
    acc
}

fn rel(o: CalcOp, a: &Expr, b: &Expr, span: &SourceSpan) -> Expr {
    Expr::typed(
        ExprKind::Binary(o.to_binop(), Box::new(a.clone()), Box::new(b.clone())),
        span.clone(),
        Type::Bool,
    )
}

/// Desugars a calc statement. Step `i` becomes a block holding its hints
/// followed by `assert line[i-1] op[i] line[i]`; the hints are scoped to
/// that block. A final `assume` records the composed relation between the
/// first and last lines.
pub fn desugar_calc(lines: &[Expr], ops: &[CalcOp], hints: &[Block], span: &SourceSpan) -> Block {
    let mut out = Vec::new();
    for i in 1..lines.len() {
        let mut b: Block = hints.get(i - 1).cloned().unwrap_or_default();
        let step = rel(ops[i - 1], &lines[i - 1], &lines[i], &lines[i].span);
        b.push(Stmt {
            kind: StmtKind::Assert(step),
            span: lines[i].span.clone(),
        });
        out.push(Stmt {
            kind: StmtKind::Block(b),
            span: lines[i].span.clone(),
        });
    }
    if let (Some(first), Some(last)) = (lines.first(), lines.last()) {
        let whole = rel(compose(ops), first, last, span);
        out.push(Stmt {
            kind: StmtKind::Assume(whole),
            span: span.clone(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition() {
        use CalcOp::*;
        assert_eq!(compose(&[Eq, Eq]), Eq);
        assert_eq!(compose(&[Eq, Le, Lt]), Lt);
        assert_eq!(compose(&[Implies, Eq, Implies]), Implies);
        assert_eq!(compose(&[Eq, Ne, Eq]), Ne);
        assert_eq!(compose(&[]), Eq);
    }
}
