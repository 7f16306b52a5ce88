// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// A location in a source file. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, line: u32, col: u32, length: u32) -> Self {
        debug_assert!(line >= 1 && col >= 1);
        SourceSpan {
            file,
            line,
            col,
            length,
        }
    }

    /// A placeholder span for synthesized nodes.
    pub fn synthetic() -> Self {
        SourceSpan::new(Arc::from("<synthetic>"), 1, 1, 0)
    }

    /// Smallest span starting at `self` that reaches the end of `other`, when
    /// both are on the same line. Otherwise keeps `self`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        if self.line == other.line && other.col >= self.col {
            SourceSpan {
                length: other.col + other.length - self.col,
                ..self.clone()
            }
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}
