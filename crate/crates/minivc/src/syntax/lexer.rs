// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::diagnostics::{Diagnostic, FrontKind};
use crate::span::SourceSpan;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

const KEYWORDS: &[&str] = &[
    "method",
    "function",
    "predicate",
    "lemma",
    "ghost",
    "datatype",
    "returns",
    "requires",
    "ensures",
    "modifies",
    "reads",
    "decreases",
    "invariant",
    "var",
    "if",
    "then",
    "else",
    "while",
    "assert",
    "assume",
    "calc",
    "match",
    "case",
    "new",
    "old",
    "forall",
    "true",
    "false",
    "null",
    "multiset",
    "int",
    "bool",
    "nat",
    "array",
    "seq",
];

// Longest first so that maximal munch works by a linear scan.
const SYMBOLS: &[&str] = &[
    "<==>", "==>", "<==", "::", ":=", "==", "!=", "<=", ">=", "&&", "||", "..", "=>", "{", "}",
    "(", ")", "[", "]", "<", ">", "+", "-", "*", "/", "%", "!", ",", ";", ":", ".", "|", "=",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '?'
}

pub fn lex(text: &str, file: &Arc<str>) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let span = |line, col, len| SourceSpan::new(file.clone(), line, col, len);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let len = (i - start) as u32;
            let n = s.parse::<i64>().map_err(|_| {
                Diagnostic::error(
                    span(line, col, len),
                    FrontKind::Syntax,
                    format!("integer literal {s} is too large"),
                )
            })?;
            toks.push(Token {
                tok: Tok::Int(n),
                span: span(line, col, len),
            });
            col += len;
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let len = (i - start) as u32;
            let tok = match KEYWORDS.iter().find(|k| **k == s) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(s),
            };
            toks.push(Token {
                tok,
                span: span(line, col, len),
            });
            col += len;
            continue;
        }
        let rest = &chars[i..];
        let sym = SYMBOLS
            .iter()
            .find(|s| s.chars().zip(rest.iter()).filter(|(a, b)| a == *b).count() == s.len());
        match sym {
            Some(s) => {
                let len = s.len() as u32;
                toks.push(Token {
                    tok: Tok::Sym(s),
                    span: span(line, col, len),
                });
                i += s.len();
                col += len;
            }
            None => {
                return Err(Diagnostic::error(
                    span(line, col, 1),
                    FrontKind::Syntax,
                    format!("unexpected character '{c}'"),
                ))
            }
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        span: span(line, col, 0),
    });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Tok> {
        lex(s, &Arc::from("t")).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn primes_are_part_of_identifiers() {
        assert_eq!(
            kinds("i' := i+1"),
            vec![
                Tok::Ident("i'".into()),
                Tok::Sym(":="),
                Tok::Ident("i".into()),
                Tok::Sym("+"),
                Tok::Int(1),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn maximal_munch_on_arrows() {
        assert_eq!(
            kinds("a <==> b ==> c <== d <= e"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("<==>"),
                Tok::Ident("b".into()),
                Tok::Sym("==>"),
                Tok::Ident("c".into()),
                Tok::Sym("<=="),
                Tok::Ident("d".into()),
                Tok::Sym("<="),
                Tok::Ident("e".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_spans() {
        let toks = lex("// hi\n  x", &Arc::from("t")).unwrap();
        assert_eq!(toks[0].span.line, 2);
        assert_eq!(toks[0].span.col, 3);
    }

    #[test]
    fn slice_after_integer() {
        assert_eq!(
            kinds("a[0..n]"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("["),
                Tok::Int(0),
                Tok::Sym(".."),
                Tok::Ident("n".into()),
                Tok::Sym("]"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bad_character() {
        assert!(lex("x $ y", &Arc::from("t")).is_err());
    }
}
