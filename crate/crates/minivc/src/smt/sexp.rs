// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Just enough s-expression reading for solver responses.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    /// Integer literal, including the `(- n)` form.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Sexp::Atom(a) => a.parse().ok(),
            Sexp::List(v) if v.len() == 2 && v[0] == Sexp::Atom("-".into()) => {
                v[1].as_int().map(|n| -n)
            }
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Sexp::Atom(a) if a == "true" => Some(true),
            Sexp::Atom(a) if a == "false" => Some(false),
            _ => None,
        }
    }
}

impl std::fmt::Display for Sexp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses every top-level s-expression in `text`. Returns `None` on
/// unbalanced input.
pub fn parse_all(text: &str) -> Option<Vec<Sexp>> {
    let cs: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = Vec::new();
    loop {
        skip_ws(&cs, &mut pos);
        if pos >= cs.len() {
            return Some(out);
        }
        out.push(parse_one(&cs, &mut pos)?);
    }
}

fn skip_ws(cs: &[char], pos: &mut usize) {
    while *pos < cs.len() {
        if cs[*pos].is_whitespace() {
            *pos += 1;
        } else if cs[*pos] == ';' {
            while *pos < cs.len() && cs[*pos] != '\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

fn parse_one(cs: &[char], pos: &mut usize) -> Option<Sexp> {
    skip_ws(cs, pos);
    match cs.get(*pos)? {
        '(' => {
            *pos += 1;
            let mut v = Vec::new();
            loop {
                skip_ws(cs, pos);
                match cs.get(*pos)? {
                    ')' => {
                        *pos += 1;
                        return Some(Sexp::List(v));
                    }
                    _ => v.push(parse_one(cs, pos)?),
                }
            }
        }
        ')' => None,
        '|' => {
            let start = *pos;
            *pos += 1;
            while *cs.get(*pos)? != '|' {
                *pos += 1;
            }
            *pos += 1;
            Some(Sexp::Atom(cs[start..*pos].iter().collect()))
        }
        '"' => {
            let start = *pos;
            *pos += 1;
            loop {
                match cs.get(*pos)? {
                    '"' if cs.get(*pos + 1) == Some(&'"') => *pos += 2,
                    '"' => break,
                    _ => *pos += 1,
                }
            }
            *pos += 1;
            Some(Sexp::Atom(cs[start..*pos].iter().collect()))
        }
        _ => {
            let start = *pos;
            while *pos < cs.len() && !cs[*pos].is_whitespace() && cs[*pos] != '(' && cs[*pos] != ')' {
                *pos += 1;
            }
            Some(Sexp::Atom(cs[start..*pos].iter().collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn get_value_response() {
        let v = parse_all("sat\n((|$n| 0) ((|f| (S Z) |$n|) (- 3)))\n").unwrap();
        assert_eq!(v[0], Sexp::Atom("sat".into()));
        let Sexp::List(pairs) = &v[1] else { panic!() };
        let Sexp::List(p) = &pairs[1] else { panic!() };
        assert_eq!(p[1].as_int(), Some(-3));
        assert_eq!(p[0].to_string(), "(|f| (S Z) |$n|)");
    }
}
