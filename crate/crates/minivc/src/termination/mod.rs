// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Termination metrics: guessing, reporting, and lexicographic decrease.

use crate::diagnostics::ObligationKind;
use crate::resolve::TypedProgram;
use crate::span::SourceSpan;
use crate::syntax::ast::*;
use crate::syntax::pretty::expr_to_string;
use crate::vcgen::term::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    User,
    Guessed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub components: Vec<Expr>,
    pub origin: Origin,
}

impl Metric {
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(expr_to_string).collect();
        parts.join(", ")
    }
}

fn int_expr(kind: ExprKind, span: &SourceSpan) -> Expr {
    Expr::typed(kind, span.clone(), Type::Int)
}

/// Guesses a loop metric from the first comparison in the guard.
pub fn guess_loop(guard: &Expr) -> Option<Metric> {
    let (o, a, b) = first_comparison(guard)?;
    let diff = |hi: &Expr, lo: &Expr| {
        int_expr(
            ExprKind::Binary(BinOp::Sub, Box::new(hi.clone()), Box::new(lo.clone())),
            &guard.span,
        )
    };
    let m = match o {
        BinOp::Lt | BinOp::Le | BinOp::Ne => diff(b, a),
        BinOp::Gt | BinOp::Ge => diff(a, b),
        _ => return None,
    };
    if a.ty() != &Type::Int {
        return None;
    }
    Some(Metric {
        components: vec![m],
        origin: Origin::Guessed,
    })
}

fn first_comparison(e: &Expr) -> Option<(BinOp, &Expr, &Expr)> {
    match &e.kind {
        ExprKind::Binary(BinOp::And, l, r) => first_comparison(l).or_else(|| first_comparison(r)),
        ExprKind::Binary(o, a, b) if o.is_relational() => Some((*o, a, b)),
        ExprKind::Chain(es, ops) => Some((ops[0], &es[0], &es[1])),
        _ => None,
    }
}

/// Guesses a declaration metric: its int- and datatype-typed in-parameters.
pub fn guess_decl(params: &[Param], span: &SourceSpan) -> Metric {
    let components = params
        .iter()
        .filter(|p| matches!(p.ty, Type::Int | Type::Datatype(..)))
        .map(|p| Expr::typed(ExprKind::Var(p.name.clone()), span.clone(), p.ty.clone()))
        .collect();
    Metric {
        components,
        origin: Origin::Guessed,
    }
}

/// The metric of a method or function: its `decreases` clause if written,
/// else the guess.
pub fn decl_metric(tp: &TypedProgram, name: &str) -> Metric {
    match tp.decl(name) {
        Some(Decl::Method(m)) => match &m.decreases {
            Some(d) => Metric {
                components: d.clone(),
                origin: Origin::User,
            },
            None => guess_decl(&m.ins, &m.span),
        },
        Some(Decl::Function(f)) => match &f.decreases {
            Some(d) => Metric {
                components: d.clone(),
                origin: Origin::User,
            },
            None => guess_decl(&f.params, &f.span),
        },
        _ => Metric {
            components: Vec::new(),
            origin: Origin::Guessed,
        },
    }
}

pub fn loop_metric(decreases: &Option<Vec<Expr>>, guard: &Expr) -> Option<Metric> {
    match decreases {
        Some(d) => Some(Metric {
            components: d.clone(),
            origin: Origin::User,
        }),
        None => guess_loop(guard),
    }
}

/// Strict decrease of component `new` below `old` in the order of its sort.
fn less(new: &Term, old: &Term, s: &Sort) -> Term {
    match s {
        Sort::Int => and(vec![lt(new.clone(), old.clone()), le(int(0), old.clone())]),
        Sort::Data(..) => lt(
            Term::app(Fun::Rank(s.clone()), vec![new.clone()]),
            Term::app(Fun::Rank(s.clone()), vec![old.clone()]),
        ),
        Sort::Seq(e) => {
            let len = |x: &Term| Term::app(Fun::SeqLen((**e).clone()), vec![x.clone()]);
            let at = |x: &Term, i: Term| Term::app(Fun::SeqAt((**e).clone()), vec![x.clone(), i]);
            let i = Term::Bound("i".into(), Sort::Int);
            and(vec![
                lt(len(new), len(old)),
                forall(
                    vec![("i".into(), Sort::Int)],
                    Vec::new(),
                    implies(
                        and(vec![le(int(0), i.clone()), lt(i.clone(), len(new))]),
                        eq(at(new, i.clone()), at(old, i)),
                    ),
                ),
            ])
        }
        _ => Term::Bool(false),
    }
}

/// Lexicographic strict decrease over the common prefix of two metrics.
/// Positions whose sorts differ cannot witness a decrease.
pub fn lex_decrease(old: &[(Term, Sort)], new: &[(Term, Sort)]) -> Term {
    let k = old.len().min(new.len());
    let mut cases = Vec::new();
    for p in 0..k {
        if new[p].1 != old[p].1 {
            continue;
        }
        let mut parts: Vec<Term> = (0..p).map(|q| eq(new[q].0.clone(), old[q].0.clone())).collect();
        parts.push(less(&new[p].0, &old[p].0, &new[p].1));
        cases.push(and(parts));
    }
    or(cases)
}

/// Obligation goals for one back-edge or recursive call. A single int
/// component is split into its decrease and its lower bound so that the
/// two failures are reported separately.
pub fn decrease_goals(old: &[(Term, Sort)], new: &[(Term, Sort)]) -> Vec<(ObligationKind, Term)> {
    if old.len() == 1 && new.len() == 1 && old[0].1 == Sort::Int && new[0].1 == Sort::Int {
        return vec![
            (ObligationKind::DecreasesDecrease, lt(new[0].0.clone(), old[0].0.clone())),
            (ObligationKind::DecreasesBounded, le(int(0), old[0].0.clone())),
        ];
    }
    vec![(ObligationKind::DecreasesDecrease, lex_decrease(old, new))]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub decl: String,
    /// `loop` or `recursion`.
    pub site: &'static str,
    pub line: u32,
    pub col: u32,
    pub metric: String,
    pub origin: Origin,
}

/// Metrics used for every loop and every recursive declaration, in source
/// order.
pub fn report(tp: &TypedProgram) -> Vec<MetricReport> {
    let mut out = Vec::new();
    for d in &tp.program.decls {
        let name = d.name();
        if matches!(d, Decl::Method(_) | Decl::Function(_)) && tp.same_scc(name, name)
            || tp.sccs().iter().any(|c| c.len() > 1 && c.iter().any(|n| n == name))
        {
            let m = decl_metric(tp, name);
            out.push(MetricReport {
                decl: name.to_string(),
                site: "recursion",
                line: d.span().line,
                col: d.span().col,
                metric: m.to_text(),
                origin: m.origin,
            });
        }
        if let Decl::Method(m) = d {
            for s in m.body.iter().flatten() {
                s.walk(&mut |s| {
                    if let StmtKind::While {
                        guard, decreases, ..
                    } = &s.kind
                    {
                        let (metric, origin) = match loop_metric(decreases, guard) {
                            Some(m) => (m.to_text(), m.origin),
                            None => (String::new(), Origin::Guessed),
                        };
                        out.push(MetricReport {
                            decl: name.to_string(),
                            site: "loop",
                            line: s.span.line,
                            col: s.span.col,
                            metric,
                            origin,
                        });
                    }
                });
            }
        }
    }
    out.sort_by_key(|r| (r.line, r.col));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn typed_int(src: &str) -> Expr {
        let mut e = parse_expr(src).unwrap();
        fn fill(e: &mut Expr) {
            e.ty = Some(Type::Int);
            e.for_each_child_mut(&mut fill);
        }
        fill(&mut e);
        e
    }

    #[test]
    fn loop_guesses() {
        let g = |s: &str| guess_loop(&typed_int(s)).map(|m| m.to_text());
        assert_eq!(g("i < k").as_deref(), Some("k - i"));
        assert_eq!(g("j > 0 && a[j-1] > a[j]").as_deref(), Some("j - 0"));
        assert_eq!(g("i < n-1").as_deref(), Some("n - 1 - i"));
        assert_eq!(g("i != n/2").as_deref(), Some("n / 2 - i"));
        assert_eq!(g("i == n"), None);
    }

    #[test]
    fn single_int_component_splits() {
        let o = vec![(Term::Const("n".into(), Sort::Int), Sort::Int)];
        let n = vec![(sub(o[0].0.clone(), int(1)), Sort::Int)];
        let goals = decrease_goals(&o, &n);
        assert_eq!(goals.len(), 2);
        assert_eq!(goals[1].0, ObligationKind::DecreasesBounded);
    }
}
