// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Obligation → SMT-LIB2 text.
//!
//! Name mangling: obligation constants print as `|$name|`, bound variables
//! as `|%name|`, user functions as `|f|` or `|f<Int,Bool>|` for generic
//! instances, constructors and destructors as `|#C|` and `|#C.field|`
//! (instance arguments appended as for functions), ranks as `|rank<D>|`,
//! and sequence operations as `|Seq.len<E>|` and so on. Every list of
//! declarations is printed in sorted order, so a fixed obligation and fuel
//! always give the same bytes.

use crate::resolve::TypedProgram;
use crate::vcgen::expr::{fn_heap_sorts, sort_of, Tr};
use crate::vcgen::term::*;
use crate::vcgen::Obligation;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

/// Functions that take a fuel argument: those with a body that can reach
/// themselves through the call graph.
pub fn fueled_functions(tp: &TypedProgram) -> BTreeSet<String> {
    tp.functions()
        .filter(|f| f.body.is_some())
        .filter(|f| {
            tp.same_scc(&f.name, &f.name)
                || tp.sccs().iter().any(|c| c.len() > 1 && c.contains(&f.name))
        })
        .map(|f| f.name.clone())
        .collect()
}

pub fn fuel_term(n: u32) -> String {
    let mut s = "Z".to_string();
    for _ in 0..n {
        s = format!("(S {s})");
    }
    s
}

fn with_args(base: &str, args: &[Sort]) -> String {
    if args.is_empty() {
        format!("|{base}|")
    } else {
        let a: Vec<String> = args.iter().map(Sort::mangle).collect();
        format!("|{base}<{}>|", a.join(","))
    }
}

fn dt_args(dt: &Sort) -> &[Sort] {
    match dt {
        Sort::Data(_, a) => a,
        _ => &[],
    }
}

pub fn sort_str(s: &Sort) -> String {
    match s {
        Sort::Int => "Int".into(),
        Sort::Bool => "Bool".into(),
        Sort::Ref => "Ref".into(),
        Sort::Fuel => "Fuel".into(),
        Sort::Param(_) | Sort::Data(..) | Sort::Seq(_) => format!("|{}|", s.mangle()),
        Sort::Multiset(e) => format!("(Array {} Int)", sort_str(e)),
        Sort::Row(e) => format!("(Array Int {})", sort_str(e)),
        Sort::Heap(e) => format!("(Array Ref (Array Int {}))", sort_str(e)),
    }
}

fn fun_str(f: &Fun) -> String {
    match f {
        Fun::User { name, targs, .. } => with_args(name, targs),
        Fun::Ctor { name, dt } => with_args(&format!("#{name}"), dt_args(dt)),
        Fun::Field {
            ctor, field, dt, ..
        } => with_args(&format!("#{ctor}.{field}"), dt_args(dt)),
        Fun::IsCtor { name, dt } => format!("(_ is {})", with_args(&format!("#{name}"), dt_args(dt))),
        Fun::Len => "len".into(),
        Fun::SeqLen(e) => format!("|Seq.len<{}>|", e.mangle()),
        Fun::SeqAt(e) => format!("|Seq.at<{}>|", e.mangle()),
        Fun::SeqOfRow(e) => format!("|Seq.ofRow<{}>|", e.mangle()),
        Fun::SeqSub(e) => format!("|Seq.sub<{}>|", e.mangle()),
        Fun::MultisetOf(e) => format!("|Seq.multiset<{}>|", e.mangle()),
        Fun::Rank(s) => format!("|rank<{}>|", s.mangle()),
    }
}

fn op_str(o: Op) -> &'static str {
    match o {
        Op::Add => "+",
        Op::Sub | Op::Neg => "-",
        Op::Mul => "*",
        Op::Div => "div",
        Op::Mod => "mod",
        Op::Eq => "=",
        Op::Lt => "<",
        Op::Le => "<=",
        Op::Gt => ">",
        Op::Ge => ">=",
        Op::And => "and",
        Op::Or => "or",
        Op::Not => "not",
        Op::Implies => "=>",
        Op::Ite => "ite",
        Op::Select => "select",
        Op::Store => "store",
    }
}

/// Prints terms. Applications of fueled functions get `fuel` as their
/// first argument.
pub struct Printer<'a> {
    pub fueled: &'a BTreeSet<String>,
    pub fuel: String,
}

impl Printer<'_> {
    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write(t, &mut s);
        s
    }

    fn write(&self, t: &Term, out: &mut String) {
        match t {
            Term::Int(n) if *n < 0 => {
                let _ = write!(out, "(- {})", n.unsigned_abs());
            }
            Term::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Term::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Term::Null => out.push_str("null"),
            Term::Const(n, _) => {
                let _ = write!(out, "|${n}|");
            }
            Term::Bound(n, _) => {
                let _ = write!(out, "|%{n}|");
            }
            Term::Op(o, args) => {
                let _ = write!(out, "({}", op_str(*o));
                for a in args {
                    out.push(' ');
                    self.write(a, out);
                }
                out.push(')');
            }
            Term::App(f, args) => {
                let fuel = match f {
                    Fun::User { name, .. } if self.fueled.contains(name) => Some(&self.fuel),
                    _ => None,
                };
                if args.is_empty() && fuel.is_none() {
                    out.push_str(&fun_str(f));
                    return;
                }
                let _ = write!(out, "({}", fun_str(f));
                if let Some(fu) = fuel {
                    let _ = write!(out, " {fu}");
                }
                for a in args {
                    out.push(' ');
                    self.write(a, out);
                }
                out.push(')');
            }
            Term::Forall(vs, pats, body) => {
                out.push_str("(forall (");
                for (i, (n, s)) in vs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "(|%{n}| {})", sort_str(s));
                }
                out.push_str(") ");
                if pats.is_empty() {
                    self.write(body, out);
                } else {
                    out.push_str("(! ");
                    self.write(body, out);
                    for p in pats {
                        out.push_str(" :pattern (");
                        for (i, x) in p.iter().enumerate() {
                            if i > 0 {
                                out.push(' ');
                            }
                            self.write(x, out);
                        }
                        out.push(')');
                    }
                    out.push(')');
                }
                out.push(')');
            }
        }
    }
}

type InstKey = (String, Vec<Sort>);

struct FunInst {
    heaps: Vec<Sort>,
    params: Vec<(String, Sort)>,
    result: Sort,
    pre: Term,
    body: Option<Term>,
    deps: BTreeSet<InstKey>,
}

/// Everything an obligation mentions, closed under function bodies and
/// datatype fields.
struct Collector<'a> {
    tp: &'a TypedProgram,
    consts: BTreeMap<String, Sort>,
    params: BTreeSet<String>,
    datas: BTreeSet<Sort>,
    seqs: BTreeSet<Sort>,
    funs: BTreeMap<InstKey, FunInst>,
}

impl<'a> Collector<'a> {
    fn sort(&mut self, s: &Sort) {
        match s {
            Sort::Param(n) => {
                self.params.insert(n.clone());
            }
            Sort::Data(n, args) => {
                args.iter().for_each(|a| self.sort(a));
                if self.datas.insert(s.clone()) {
                    if let Some(dt) = self.tp.datatype(n) {
                        let tsub: HashMap<String, Sort> =
                            dt.type_params.iter().cloned().zip(args.iter().cloned()).collect();
                        for c in &dt.ctors {
                            for f in &c.fields {
                                self.sort(&sort_of(&f.ty, &tsub));
                            }
                        }
                    }
                }
            }
            Sort::Seq(e) => {
                self.sort(e);
                self.seqs.insert((**e).clone());
            }
            Sort::Multiset(e) | Sort::Row(e) | Sort::Heap(e) => self.sort(e),
            _ => {}
        }
    }

    /// Notes everything in `t`; returns the user-function instances it
    /// applies.
    fn term(&mut self, t: &Term, consts: bool) -> BTreeSet<InstKey> {
        let mut insts = BTreeSet::new();
        let mut sorts = Vec::new();
        t.walk(&mut |x| match x {
            Term::Const(n, s) => {
                if consts {
                    self.consts.insert(n.clone(), s.clone());
                }
                sorts.push(s.clone());
            }
            Term::Bound(_, s) => sorts.push(s.clone()),
            Term::Forall(vs, ..) => sorts.extend(vs.iter().map(|v| v.1.clone())),
            Term::App(f, _) => match f {
                Fun::User {
                    name,
                    targs,
                    heaps,
                    result,
                } => {
                    insts.insert((name.clone(), targs.clone()));
                    sorts.extend(targs.iter().cloned());
                    sorts.extend(heaps.iter().cloned());
                    sorts.push(result.clone());
                }
                Fun::Ctor { dt, .. } | Fun::IsCtor { dt, .. } | Fun::Rank(dt) => sorts.push(dt.clone()),
                Fun::Field { dt, result, .. } => {
                    sorts.push(dt.clone());
                    sorts.push(result.clone());
                }
                Fun::SeqLen(e) | Fun::SeqAt(e) | Fun::SeqOfRow(e) | Fun::SeqSub(e) | Fun::MultisetOf(e) => {
                    sorts.push(Sort::Seq(Box::new(e.clone())))
                }
                Fun::Len => {}
            },
            _ => {}
        });
        for s in sorts {
            self.sort(&s);
        }
        for k in &insts {
            self.instance(k);
        }
        insts
    }

    fn instance(&mut self, key: &InstKey) {
        if self.funs.contains_key(key) {
            return;
        }
        let tp = self.tp;
        let f = tp.function(&key.0).expect("resolved function");
        let tsub: HashMap<String, Sort> =
            f.type_params.iter().cloned().zip(key.1.iter().cloned()).collect();
        let heaps = fn_heap_sorts(f, &tsub);
        let params: Vec<(String, Sort)> = f
            .params
            .iter()
            .map(|p| (p.name.clone(), sort_of(&p.ty, &tsub)))
            .collect();
        let mut tr = Tr::new(tp);
        tr.tsub = tsub.clone();
        for (n, s) in &params {
            tr.vars.insert(n.clone(), Term::Bound(n.clone(), s.clone()));
        }
        for h in &heaps {
            let b = Term::Bound(format!("heap<{}>", h.mangle()), Sort::Heap(Box::new(h.clone())));
            tr.heaps.insert(h.clone(), b.clone());
            tr.old_heaps.insert(h.clone(), b);
        }
        let pre = and(f.requires.iter().map(|r| tr.expr(r)).collect());
        let body = f.body.as_ref().map(|b| tr.expr(b));
        // Reserve the slot first so recursive instances terminate.
        self.funs.insert(
            key.clone(),
            FunInst {
                heaps,
                params,
                result: sort_of(&f.result, &tsub),
                pre: pre.clone(),
                body: body.clone(),
                deps: BTreeSet::new(),
            },
        );
        let mut deps = self.term(&pre, true);
        if let Some(b) = &body {
            deps.extend(self.term(b, true));
        }
        self.funs.get_mut(key).expect("reserved").deps = deps;
    }
}

fn seq_axioms(e: &Sort, out: &mut String) {
    let es = sort_str(e);
    let m = e.mangle();
    let seq = format!("|Seq<{m}>|");
    let len = format!("|Seq.len<{m}>|");
    let at = format!("|Seq.at<{m}>|");
    let of_row = format!("|Seq.ofRow<{m}>|");
    let sub = format!("|Seq.sub<{m}>|");
    let ms = format!("|Seq.multiset<{m}>|");
    let row = format!("(Array Int {es})");
    let _ = writeln!(out, "(declare-fun {len} ({seq}) Int)");
    let _ = writeln!(out, "(declare-fun {at} ({seq} Int) {es})");
    let _ = writeln!(out, "(declare-fun {of_row} ({row} Int Int) {seq})");
    let _ = writeln!(out, "(declare-fun {sub} ({seq} Int Int) {seq})");
    let _ = writeln!(out, "(declare-fun {ms} ({seq}) (Array {es} Int))");
    let _ = writeln!(
        out,
        "(assert (forall ((s {seq})) (! (<= 0 ({len} s)) :pattern (({len} s)))))"
    );
    let _ = writeln!(
        out,
        "(assert (forall ((r {row}) (lo Int) (hi Int)) (! (=> (<= 0 lo hi) (= ({len} ({of_row} r lo hi)) (- hi lo))) :pattern (({of_row} r lo hi)))))"
    );
    let _ = writeln!(
        out,
        "(assert (forall ((r {row}) (lo Int) (hi Int) (i Int)) (! (=> (and (<= 0 lo hi) (<= 0 i) (< i (- hi lo))) (= ({at} ({of_row} r lo hi) i) (select r (+ lo i)))) :pattern (({at} ({of_row} r lo hi) i)))))"
    );
    let _ = writeln!(
        out,
        "(assert (forall ((s {seq}) (lo Int) (hi Int)) (! (=> (<= 0 lo hi ({len} s)) (= ({len} ({sub} s lo hi)) (- hi lo))) :pattern (({sub} s lo hi)))))"
    );
    let _ = writeln!(
        out,
        "(assert (forall ((s {seq}) (lo Int) (hi Int) (i Int)) (! (=> (and (<= 0 lo hi ({len} s)) (<= 0 i) (< i (- hi lo))) (= ({at} ({sub} s lo hi) i) ({at} s (+ lo i)))) :pattern (({at} ({sub} s lo hi) i)))))"
    );
    let _ = writeln!(
        out,
        "(assert (forall ((s {seq}) (x {es})) (! (<= 0 (select ({ms} s) x)) :pattern ((select ({ms} s) x)))))"
    );
    // Swapping two elements inside the slice preserves its multiset.
    let _ = writeln!(
        out,
        "(assert (forall ((r {row}) (lo Int) (hi Int) (i Int) (j Int)) (! (=> (and (<= 0 lo) (<= lo i) (< i hi) (<= lo j) (< j hi)) (= ({ms} ({of_row} (store (store r i (select r j)) j (select r i)) lo hi)) ({ms} ({of_row} r lo hi)))) :pattern (({ms} ({of_row} (store (store r i (select r j)) j (select r i)) lo hi))))))"
    );
    // Overwriting one element moves one count from the old to the new value.
    let _ = writeln!(
        out,
        "(assert (forall ((r {row}) (lo Int) (hi Int) (i Int) (v {es})) (! (=> (and (<= 0 lo) (<= lo i) (< i hi)) (= ({ms} ({of_row} (store r i v) lo hi)) (let ((m0 (store ({ms} ({of_row} r lo hi)) (select r i) (- (select ({ms} ({of_row} r lo hi)) (select r i)) 1)))) (store m0 v (+ (select m0 v) 1))))) :pattern (({ms} ({of_row} (store r i v) lo hi))))))"
    );
}

fn data_decls(tp: &TypedProgram, datas: &BTreeSet<Sort>, out: &mut String) {
    if datas.is_empty() {
        return;
    }
    let mut heads = Vec::new();
    let mut bodies = Vec::new();
    for d in datas {
        let Sort::Data(n, args) = d else { continue };
        let Some(dt) = tp.datatype(n) else { continue };
        let tsub: HashMap<String, Sort> =
            dt.type_params.iter().cloned().zip(args.iter().cloned()).collect();
        heads.push(format!("({} 0)", sort_str(d)));
        let mut ctors = Vec::new();
        for c in &dt.ctors {
            let mut s = format!("({}", with_args(&format!("#{}", c.name), args));
            for f in &c.fields {
                let _ = write!(
                    s,
                    " ({} {})",
                    with_args(&format!("#{}.{}", c.name, f.name), args),
                    sort_str(&sort_of(&f.ty, &tsub))
                );
            }
            s.push(')');
            ctors.push(s);
        }
        bodies.push(format!("({})", ctors.join(" ")));
    }
    let _ = writeln!(
        out,
        "(declare-datatypes ({}) ({}))",
        heads.join(" "),
        bodies.join(" ")
    );
    for d in datas {
        let Sort::Data(n, args) = d else { continue };
        let Some(dt) = tp.datatype(n) else { continue };
        let tsub: HashMap<String, Sort> =
            dt.type_params.iter().cloned().zip(args.iter().cloned()).collect();
        let ds = sort_str(d);
        let rank = fun_str(&Fun::Rank(d.clone()));
        let _ = writeln!(out, "(declare-fun {rank} ({ds}) Int)");
        let _ = writeln!(
            out,
            "(assert (forall ((x {ds})) (! (<= 0 ({rank} x)) :pattern (({rank} x)))))"
        );
        for c in &dt.ctors {
            let cname = with_args(&format!("#{}", c.name), args);
            if c.fields.is_empty() {
                let _ = writeln!(out, "(assert (= ({rank} {cname}) 1))");
                continue;
            }
            let mut binders = Vec::new();
            let mut names = Vec::new();
            let mut sum = vec!["1".to_string()];
            for (i, f) in c.fields.iter().enumerate() {
                let fs = sort_of(&f.ty, &tsub);
                binders.push(format!("(f{i} {})", sort_str(&fs)));
                names.push(format!("f{i}"));
                if &fs == d {
                    sum.push(format!("({rank} f{i})"));
                }
            }
            let app = format!("({cname} {})", names.join(" "));
            let _ = writeln!(
                out,
                "(assert (forall ({}) (! (= ({rank} {app}) (+ {})) :pattern ({app}))))",
                binders.join(" "),
                sum.join(" ")
            );
            for f in &c.fields {
                if &sort_of(&f.ty, &tsub) != d {
                    continue;
                }
                let sel = with_args(&format!("#{}.{}", c.name, f.name), args);
                let _ = writeln!(
                    out,
                    "(assert (forall ((x {ds})) (! (=> ((_ is {cname}) x) (< ({rank} ({sel} x)) ({rank} x))) :pattern (({sel} x)))))"
                );
            }
        }
    }
}

/// Instantiation is driven by patterns only. Without `auto_config false`
/// z3 re-enables model-based instantiation, which unfolds fueled functions
/// past their fuel. Candidate models are still requested so that failed
/// obligations come with values to show.
pub const SOLVER_OPTIONS: &str = "(set-option :produce-models true)\n\
(set-option :auto_config false)\n\
(set-option :smt.mbqi false)\n\
(set-option :smt.candidate_models true)\n";

/// The complete script for `ob`: background, the obligation's hypotheses
/// and negated goal, `check-sat`, and a `get-value` for `values`.
pub fn lower_script(
    tp: &TypedProgram,
    ob: &Obligation,
    fuel: u32,
    facts: &[Term],
    values: &[Term],
) -> String {
    let fueled = fueled_functions(tp);
    let mut c = Collector {
        tp,
        consts: BTreeMap::new(),
        params: BTreeSet::new(),
        datas: BTreeSet::new(),
        seqs: BTreeSet::new(),
        funs: BTreeMap::new(),
    };
    for t in ob.hypotheses.iter().chain([&ob.goal]).chain(facts) {
        c.term(t, true);
    }
    let top = Printer {
        fueled: &fueled,
        fuel: fuel_term(fuel),
    };
    let inner = Printer {
        fueled: &fueled,
        fuel: "|%fuel|".into(),
    };

    let mut out = String::new();
    let _ = writeln!(out, "; {} {} {}", ob.decl, ob.kind, ob.span);
    out.push_str(SOLVER_OPTIONS);
    out.push_str("(set-logic ALL)\n");
    out.push_str("(declare-sort Ref 0)\n(declare-const null Ref)\n(declare-fun len (Ref) Int)\n");
    out.push_str("(assert (forall ((r Ref)) (! (<= 0 (len r)) :pattern ((len r)))))\n");
    out.push_str("(declare-datatypes ((Fuel 0)) (((Z) (S (pred Fuel)))))\n");
    for p in &c.params {
        let _ = writeln!(out, "(declare-sort |@{p}| 0)");
    }
    let seq_sorts: BTreeSet<String> = c.seqs.iter().map(|e| format!("|Seq<{}>|", e.mangle())).collect();
    for s in &seq_sorts {
        let _ = writeln!(out, "(declare-sort {s} 0)");
    }
    data_decls(tp, &c.datas, &mut out);
    for e in &c.seqs {
        seq_axioms(e, &mut out);
    }

    // Functions: fueled and bodiless ones are declared, the rest defined in
    // dependency order, then the fuel axioms.
    let sig = |k: &InstKey, fi: &FunInst| -> (String, Vec<String>) {
        let name = with_args(&k.0, &k.1);
        let mut args: Vec<String> = fi
            .heaps
            .iter()
            .map(|h| format!("(|%heap<{}>| {})", h.mangle(), sort_str(&Sort::Heap(Box::new(h.clone())))))
            .collect();
        args.extend(fi.params.iter().map(|(n, s)| format!("(|%{n}| {})", sort_str(s))));
        (name, args)
    };
    let declared = |k: &InstKey, fi: &FunInst| fueled.contains(&k.0) || fi.body.is_none();
    for (k, fi) in &c.funs {
        if !declared(k, fi) {
            continue;
        }
        let name = with_args(&k.0, &k.1);
        let mut sorts: Vec<String> = Vec::new();
        if fueled.contains(&k.0) {
            sorts.push("Fuel".into());
        }
        sorts.extend(fi.heaps.iter().map(|h| sort_str(&Sort::Heap(Box::new(h.clone())))));
        sorts.extend(fi.params.iter().map(|(_, s)| sort_str(s)));
        let _ = writeln!(out, "(declare-fun {name} ({}) {})", sorts.join(" "), sort_str(&fi.result));
    }
    let mut done: BTreeSet<InstKey> = BTreeSet::new();
    fn visit(
        k: &InstKey,
        funs: &BTreeMap<InstKey, FunInst>,
        skip: &dyn Fn(&InstKey, &FunInst) -> bool,
        done: &mut BTreeSet<InstKey>,
        order: &mut Vec<InstKey>,
    ) {
        if done.contains(k) {
            return;
        }
        done.insert(k.clone());
        let fi = &funs[k];
        for d in &fi.deps {
            visit(d, funs, skip, done, order);
        }
        if !skip(k, fi) {
            order.push(k.clone());
        }
    }
    let mut order = Vec::new();
    for k in c.funs.keys() {
        visit(k, &c.funs, &declared, &mut done, &mut order);
    }
    for k in &order {
        let fi = &c.funs[k];
        let (name, args) = sig(k, fi);
        let body = fi.body.as_ref().expect("defined functions have bodies");
        let _ = writeln!(
            out,
            "(define-fun {name} ({}) {} {})",
            args.join(" "),
            sort_str(&fi.result),
            top.term(body)
        );
    }
    for (k, fi) in &c.funs {
        if !fueled.contains(&k.0) {
            continue;
        }
        let Some(body) = &fi.body else { continue };
        let (name, args) = sig(k, fi);
        let mut actuals: Vec<String> = fi.heaps.iter().map(|h| format!("|%heap<{}>|", h.mangle())).collect();
        actuals.extend(fi.params.iter().map(|(n, _)| format!("|%{n}|")));
        let actuals = actuals.join(" ");
        let binders = format!("(|%fuel| Fuel) {}", args.join(" "));
        let succ = format!("({name} (S |%fuel|) {actuals})");
        let _ = writeln!(
            out,
            "(assert (forall ({binders}) (! (= {succ} ({name} |%fuel| {actuals})) :pattern ({succ}))))"
        );
        let _ = writeln!(
            out,
            "(assert (forall ({binders}) (! (=> {} (= {succ} {})) :pattern ({succ}))))",
            inner.term(&fi.pre),
            inner.term(body)
        );
    }

    for (n, s) in &c.consts {
        let _ = writeln!(out, "(declare-const |${n}| {})", sort_str(s));
    }
    for f in facts {
        let _ = writeln!(out, "(assert {})", top.term(f));
    }
    for h in &ob.hypotheses {
        let _ = writeln!(out, "(assert {})", top.term(h));
    }
    let _ = writeln!(out, "(assert (not {}))", top.term(&ob.goal));
    out.push_str("(check-sat)\n");
    if !values.is_empty() {
        let vs: Vec<String> = values.iter().map(|v| top.term(v)).collect();
        let _ = writeln!(out, "(get-value ({}))", vs.join(" "));
    }
    out
}
