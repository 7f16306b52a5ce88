// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Diagnostics shared by every phase of the pipeline.

use crate::span::SourceSpan;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

/// What a verification condition establishes when it is valid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObligationKind {
    PreconditionAtCall,
    Postcondition,
    InvariantEntry,
    InvariantMaintenance,
    Assertion,
    IndexBounds,
    NullDeref,
    Division,
    FunctionPrecondition,
    DecreasesDecrease,
    DecreasesBounded,
    CalcStep,
    FramePostcondition,
}

impl ObligationKind {
    pub const ALL: [ObligationKind; 13] = [
        ObligationKind::PreconditionAtCall,
        ObligationKind::Postcondition,
        ObligationKind::InvariantEntry,
        ObligationKind::InvariantMaintenance,
        ObligationKind::Assertion,
        ObligationKind::IndexBounds,
        ObligationKind::NullDeref,
        ObligationKind::Division,
        ObligationKind::FunctionPrecondition,
        ObligationKind::DecreasesDecrease,
        ObligationKind::DecreasesBounded,
        ObligationKind::CalcStep,
        ObligationKind::FramePostcondition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObligationKind::PreconditionAtCall => "precondition-at-call",
            ObligationKind::Postcondition => "postcondition",
            ObligationKind::InvariantEntry => "invariant-entry",
            ObligationKind::InvariantMaintenance => "invariant-maintenance",
            ObligationKind::Assertion => "assertion",
            ObligationKind::IndexBounds => "index-bounds",
            ObligationKind::NullDeref => "null-deref",
            ObligationKind::Division => "division",
            ObligationKind::FunctionPrecondition => "function-precondition",
            ObligationKind::DecreasesDecrease => "decreases-decrease",
            ObligationKind::DecreasesBounded => "decreases-bounded",
            ObligationKind::CalcStep => "calc-step",
            ObligationKind::FramePostcondition => "frame-postcondition",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Message used when the obligation cannot be proved.
    pub fn failure_message(self) -> &'static str {
        match self {
            ObligationKind::PreconditionAtCall => "a precondition for this call might not hold",
            ObligationKind::Postcondition => "a postcondition might not hold on this return path",
            ObligationKind::InvariantEntry => "this loop invariant might not hold on entry",
            ObligationKind::InvariantMaintenance => {
                "this loop invariant might not be maintained by the loop"
            }
            ObligationKind::Assertion => "assertion might not hold",
            ObligationKind::IndexBounds => "index out of range",
            ObligationKind::NullDeref => "target object might be null",
            ObligationKind::Division => "possible division by zero",
            ObligationKind::FunctionPrecondition => "function precondition might not hold",
            ObligationKind::DecreasesDecrease => "decreases expression might not decrease",
            ObligationKind::DecreasesBounded => "decreases expression must be bounded below by 0",
            ObligationKind::CalcStep => "the calculation step might not hold",
            ObligationKind::FramePostcondition => "modified state outside the modifies clause",
        }
    }
}

impl fmt::Display for ObligationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Diagnostic classes raised before verification conditions are solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontKind {
    Syntax,
    UnresolvedName,
    TypeMismatch,
    ArityMismatch,
    DuplicateName,
    GhostFlow,
    InsufficientReads,
    ModifiesViolation,
    DefiniteAssignment,
    OldContext,
    CalcRelation,
    TerminationMetricRequired,
    LemmaAssumed,
    AssumeRemaining,
    Unsupported,
    GuessedMetric,
}

impl FrontKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontKind::Syntax => "syntax",
            FrontKind::UnresolvedName => "unresolved-name",
            FrontKind::TypeMismatch => "type-mismatch",
            FrontKind::ArityMismatch => "arity-mismatch",
            FrontKind::DuplicateName => "duplicate-name",
            FrontKind::GhostFlow => "ghost-flow",
            FrontKind::InsufficientReads => "insufficient-reads",
            FrontKind::ModifiesViolation => "modifies-violation",
            FrontKind::DefiniteAssignment => "definite-assignment",
            FrontKind::OldContext => "old-context",
            FrontKind::CalcRelation => "calc-relation",
            FrontKind::TerminationMetricRequired => "termination-metric-required",
            FrontKind::LemmaAssumed => "lemma-assumed",
            FrontKind::AssumeRemaining => "assume-remaining",
            FrontKind::Unsupported => "unsupported",
            FrontKind::GuessedMetric => "guessed-metric",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum DiagKind {
    Front(FrontKind),
    Obligation(ObligationKind),
}

impl DiagKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagKind::Front(k) => k.as_str(),
            DiagKind::Obligation(k) => k.as_str(),
        }
    }
}

impl fmt::Display for DiagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<FrontKind> for DiagKind {
    fn from(k: FrontKind) -> Self {
        DiagKind::Front(k)
    }
}

impl From<ObligationKind> for DiagKind {
    fn from(k: ObligationKind) -> Self {
        DiagKind::Obligation(k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub severity: Severity,
    pub kind: DiagKind,
    pub message: String,
    /// Counterexample bindings, when the solver produced a model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Diagnostic {
    pub fn error(span: SourceSpan, kind: impl Into<DiagKind>, message: impl Into<String>) -> Self {
        Diagnostic {
            span,
            severity: Severity::Error,
            kind: kind.into(),
            message: message.into(),
            counterexample: None,
            label: None,
        }
    }

    pub fn warning(
        span: SourceSpan,
        kind: impl Into<DiagKind>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(span, kind, message)
        }
    }

    pub fn info(span: SourceSpan, kind: impl Into<DiagKind>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Info,
            ..Diagnostic::error(span, kind, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    fn sort_key(&self) -> (&str, u32, u32, &'static str, Severity, &str) {
        (
            &self.span.file,
            self.span.line,
            self.span.col,
            self.kind.as_str(),
            self.severity,
            &self.message,
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}: {}: {}",
            self.span, self.severity, self.kind, self.message
        )?;
        if let Some(cex) = &self.counterexample {
            if !cex.is_empty() {
                let bindings: Vec<String> = cex.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                write!(f, " [counterexample: {}]", bindings.join(", "))?;
            }
        }
        Ok(())
    }
}

/// Orders diagnostics by file, line, column and kind.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}
