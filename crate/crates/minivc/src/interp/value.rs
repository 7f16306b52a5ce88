// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::span::SourceSpan;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Runtime values. Arrays are references into the interpreter heap;
/// sequences and multisets are immutable values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Null,
    /// Index into the heap.
    Array(usize),
    Seq(Vec<Value>),
    Multiset(BTreeMap<Value, u64>),
    Data(String, Vec<Value>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn multiset_of(xs: &[Value]) -> Value {
        let mut m = BTreeMap::new();
        for x in xs {
            *m.entry(x.clone()).or_insert(0) += 1;
        }
        Value::Multiset(m)
    }
}

/// Renders values, resolving array references through `heap`.
pub struct Show<'a>(pub &'a Value, pub &'a [Vec<Value>]);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let heap = self.1;
        let list = |f: &mut fmt::Formatter<'_>, xs: &[Value]| {
            f.write_str("[")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", Show(x, heap))?;
            }
            f.write_str("]")
        };
        match self.0 {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Null => f.write_str("null"),
            Value::Array(r) => match heap.get(*r) {
                Some(xs) => list(f, xs),
                None => write!(f, "<array {r}>"),
            },
            Value::Seq(xs) => list(f, xs),
            Value::Multiset(m) => {
                f.write_str("multiset{")?;
                let mut first = true;
                for (x, n) in m {
                    for _ in 0..*n {
                        if !first {
                            f.write_str(", ")?;
                        }
                        first = false;
                        write!(f, "{}", Show(x, heap))?;
                    }
                }
                f.write_str("}")
            }
            Value::Data(c, fs) if fs.is_empty() => f.write_str(c),
            Value::Data(c, fs) => {
                write!(f, "{c}(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Show(x, heap))?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultKind {
    Precondition,
    Postcondition,
    Invariant,
    Assert,
    Bounds,
    Null,
    Division,
    NonterminationBudget,
    /// A specification the interpreter cannot evaluate, e.g. an unbounded
    /// quantifier.
    Unevaluable,
    /// Integer overflow of the 64-bit machine representation.
    Overflow,
}

impl FaultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::Precondition => "precondition",
            FaultKind::Postcondition => "postcondition",
            FaultKind::Invariant => "invariant",
            FaultKind::Assert => "assert",
            FaultKind::Bounds => "bounds",
            FaultKind::Null => "null",
            FaultKind::Division => "division",
            FaultKind::NonterminationBudget => "nontermination-budget",
            FaultKind::Unevaluable => "unevaluable",
            FaultKind::Overflow => "overflow",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: runtime fault ({}): {message}", kind.as_str())]
pub struct RuntimeFault {
    pub kind: FaultKind,
    pub span: SourceSpan,
    pub message: String,
}

impl RuntimeFault {
    pub fn new(kind: FaultKind, span: &SourceSpan, message: impl Into<String>) -> Self {
        RuntimeFault {
            kind,
            span: span.clone(),
            message: message.into(),
        }
    }
}

/// Euclidean division: the remainder is never negative. Shared by the
/// interpreter and constant folding in the verifier.
pub fn euclid_div(a: i64, b: i64) -> Option<i64> {
    if b == 0 {
        return None;
    }
    let q = a.checked_div(b)?;
    let r = a.checked_rem(b)?;
    Some(if r < 0 { if b > 0 { q - 1 } else { q + 1 } } else { q })
}

pub fn euclid_mod(a: i64, b: i64) -> Option<i64> {
    if b == 0 {
        return None;
    }
    let r = a.checked_rem(b)?;
    Some(if r < 0 { r + b.abs() } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_division() {
        for a in -20..=20i64 {
            for b in [-7i64, -3, -1, 1, 2, 5] {
                let (q, r) = (euclid_div(a, b).unwrap(), euclid_mod(a, b).unwrap());
                assert_eq!(q * b + r, a);
                assert!(0 <= r && r < b.abs(), "{a} {b}");
            }
        }
        assert_eq!(euclid_div(1, 0), None);
    }
}
