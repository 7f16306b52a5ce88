use minivc::resolve::{check_frames, check_ghost, resolve_and_typecheck};
use minivc::syntax::{parse, pretty_print, Node};
use std::fs;
use std::path::Path;

fn corpus() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dfy"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn every_corpus_program_resolves_cleanly() {
    for (name, text) in corpus() {
        let prog = parse(&text, &name).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        let tp = resolve_and_typecheck(&prog).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        let g = check_ghost(&tp);
        assert!(g.is_empty(), "{name}: {g:?}");
        let f = check_frames(&tp);
        assert!(f.is_empty(), "{name}: {f:?}");
    }
}

#[test]
fn corpus_round_trips_through_the_printer() {
    for (name, text) in corpus() {
        let p1 = parse(&text, &name).unwrap();
        let printed = pretty_print(Node::Program(&p1));
        let p2 = parse(&printed, &name).unwrap_or_else(|e| panic!("{name}: {e:?}\n{printed}"));
        assert_eq!(
            pretty_print(Node::Program(&p2)),
            printed,
            "{name}: printing is not a fixpoint"
        );
    }
}

#[test]
fn every_expression_is_typed_after_resolution() {
    for (name, text) in corpus() {
        let tp = resolve_and_typecheck(&parse(&text, &name).unwrap()).unwrap();
        for d in &tp.program.decls {
            let check = |e: &minivc::syntax::ast::Expr| {
                e.walk(&mut |x| assert!(x.ty.is_some(), "{name}: untyped {x:?}"))
            };
            match d {
                minivc::syntax::ast::Decl::Method(m) => {
                    m.requires.iter().chain(&m.ensures).for_each(check);
                    for s in m.body.iter().flatten() {
                        s.walk(&mut |s| s.exprs().into_iter().for_each(check));
                    }
                }
                minivc::syntax::ast::Decl::Function(f) => {
                    f.requires.iter().chain(&f.body).for_each(check)
                }
                _ => {}
            }
        }
    }
}
