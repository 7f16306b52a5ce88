// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Name resolution and type checking, plus the ghost and frame checks.

mod frames;
mod ghost;
mod typing;

pub use frames::check_frames;
pub use ghost::check_ghost;

use crate::diagnostics::Diagnostic;
use crate::syntax::ast::*;
use std::collections::{BTreeMap, BTreeSet};

/// A program whose names are bound and whose expressions all carry types.
///
/// Calls written as `x := M(..)` have been rewritten into `StmtKind::Call`,
/// constructor uses into `ExprKind::CtorCall`, and named types into
/// `Type::TypeVar` / `Type::Datatype`.
#[derive(Clone, Debug)]
pub struct TypedProgram {
    pub program: Program,
    /// Caller → callees, following calls in bodies (method calls, lemma calls
    /// and function applications).
    pub call_graph: BTreeMap<String, BTreeSet<String>>,
}

impl TypedProgram {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.program.decls.iter().find(|d| d.name() == name)
    }

    pub fn method(&self, name: &str) -> Option<&Method> {
        match self.decl(name) {
            Some(Decl::Method(m)) => Some(m),
            _ => None,
        }
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        match self.decl(name) {
            Some(Decl::Function(f)) => Some(f),
            _ => None,
        }
    }

    pub fn datatype(&self, name: &str) -> Option<&Datatype> {
        match self.decl(name) {
            Some(Decl::Datatype(d)) => Some(d),
            _ => None,
        }
    }

    /// The datatype declaring constructor `ctor`, with the constructor.
    pub fn ctor(&self, ctor: &str) -> Option<(&Datatype, &Constructor)> {
        self.program.decls.iter().find_map(|d| match d {
            Decl::Datatype(dt) => dt.ctors.iter().find(|c| c.name == ctor).map(|c| (dt, c)),
            _ => None,
        })
    }

    pub fn methods(&self) -> impl Iterator<Item = &Method> {
        self.program.decls.iter().filter_map(|d| match d {
            Decl::Method(m) => Some(m),
            _ => None,
        })
    }

    pub fn functions(&self) -> impl Iterator<Item = &Function> {
        self.program.decls.iter().filter_map(|d| match d {
            Decl::Function(f) => Some(f),
            _ => None,
        })
    }

    pub fn datatypes(&self) -> impl Iterator<Item = &Datatype> {
        self.program.decls.iter().filter_map(|d| match d {
            Decl::Datatype(d) => Some(d),
            _ => None,
        })
    }

    /// Strongly connected components of the call graph, each sorted by name,
    /// listed in a deterministic order.
    pub fn sccs(&self) -> Vec<Vec<String>> {
        use petgraph::graphmap::DiGraphMap;
        let mut g: DiGraphMap<&str, ()> = DiGraphMap::new();
        for d in &self.program.decls {
            g.add_node(d.name());
        }
        for (caller, callees) in &self.call_graph {
            for c in callees {
                g.add_edge(caller.as_str(), c.as_str(), ());
            }
        }
        let mut out: Vec<Vec<String>> = petgraph::algo::tarjan_scc(&g)
            .into_iter()
            .map(|scc| {
                let mut v: Vec<String> = scc.into_iter().map(str::to_string).collect();
                v.sort();
                v
            })
            .collect();
        out.sort();
        out
    }

    /// Whether `callee` is in the same strongly connected component as
    /// `caller`, i.e. the call is (mutually) recursive.
    pub fn same_scc(&self, caller: &str, callee: &str) -> bool {
        if caller == callee {
            return self
                .call_graph
                .get(caller)
                .is_some_and(|cs| cs.contains(callee));
        }
        self.reaches(caller, callee) && self.reaches(callee, caller)
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if let Some(cs) = self.call_graph.get(n) {
                for c in cs {
                    if c == to {
                        return true;
                    }
                    if seen.insert(c.as_str()) {
                        stack.push(c);
                    }
                }
            }
        }
        false
    }
}

/// Resolves names and checks types. On success every expression in the
/// returned program has `ty` set.
pub fn resolve_and_typecheck(p: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let program = typing::check_program(p)?;
    let call_graph = build_call_graph(&program);
    Ok(TypedProgram {
        program,
        call_graph,
    })
}

fn expr_callees(e: &Expr, out: &mut BTreeSet<String>) {
    e.walk(&mut |x| {
        if let ExprKind::FnCall(f, _) = &x.kind {
            out.insert(f.clone());
        }
    });
}

fn build_call_graph(p: &Program) -> BTreeMap<String, BTreeSet<String>> {
    let mut g = BTreeMap::new();
    for d in &p.decls {
        let mut callees = BTreeSet::new();
        match d {
            Decl::Method(m) => {
                if let Some(body) = &m.body {
                    for s in body {
                        s.walk(&mut |s| {
                            if let StmtKind::Call { callee, .. } = &s.kind {
                                callees.insert(callee.clone());
                            }
                            for e in s.exprs() {
                                expr_callees(e, &mut callees);
                            }
                        });
                    }
                }
            }
            Decl::Function(f) => {
                if let Some(body) = &f.body {
                    expr_callees(body, &mut callees);
                }
            }
            Decl::Datatype(_) => {}
        }
        g.insert(d.name().to_string(), callees);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{DiagKind, FrontKind};
    use crate::syntax::parse;

    fn resolve(src: &str) -> Result<TypedProgram, Vec<Diagnostic>> {
        resolve_and_typecheck(&parse(src, "t.dfy").unwrap())
    }

    #[test]
    fn string_literal_argument_is_rejected() {
        // No string literals in this language; a bool stands in for "x".
        let errs = resolve(
            "function factorial(n: int): int { 0 }\nmethod M() { assert factorial(true) == 1; }",
        )
        .unwrap_err();
        assert_eq!(errs[0].kind, DiagKind::Front(FrontKind::TypeMismatch));
    }

    #[test]
    fn arity_mismatch() {
        let errs = resolve("function g(n: int): int { n }\nmethod M() { assert g(1, 2) == 1; }")
            .unwrap_err();
        assert_eq!(errs[0].kind, DiagKind::Front(FrontKind::ArityMismatch));
    }

    #[test]
    fn unresolved_name() {
        let errs = resolve("method M() { assert y == 1; }").unwrap_err();
        assert_eq!(errs[0].kind, DiagKind::Front(FrontKind::UnresolvedName));
        assert_eq!(errs[0].span.line, 1);
    }

    #[test]
    fn method_call_assignment_becomes_call() {
        let tp = resolve(
            "method Inc(x: int) returns (y: int) ensures y == x + 1 { y := x + 1; }\n\
             method M() { var a := 0; a := Inc(a); }",
        )
        .unwrap();
        let m = tp.method("M").unwrap();
        assert!(matches!(m.body.as_ref().unwrap()[1].kind, StmtKind::Call { .. }));
        assert!(tp.call_graph["M"].contains("Inc"));
    }

    #[test]
    fn old_in_requires_is_rejected() {
        let errs = resolve("method M(a: array<int>) requires old(a) != null { }").unwrap_err();
        assert_eq!(errs[0].kind, DiagKind::Front(FrontKind::OldContext));
    }

    #[test]
    fn out_parameter_must_be_assigned() {
        let errs = resolve("method M(b: bool) returns (r: int) { if b { r := 1; } }").unwrap_err();
        assert_eq!(errs[0].kind, DiagKind::Front(FrontKind::DefiniteAssignment));
    }

    #[test]
    fn duplicate_declarations() {
        let errs = resolve("method M() { }\nmethod M() { }").unwrap_err();
        assert_eq!(errs[0].kind, DiagKind::Front(FrontKind::DuplicateName));
    }
}
