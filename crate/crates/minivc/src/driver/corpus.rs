// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Running a directory of programs against a manifest of expected outcomes.
//!
//! The manifest has one JSON object per line:
//!
//! ```text
//! {"file": "factorial_final.dfy", "expect": "verified"}
//! {"file": "factorial_broken_entry.dfy", "expect": "error", "kind": "invariant-entry", "line": 15}
//! {"file": "compute5f_no_lemmas.dfy", "expect": "error",
//!  "errors": [{"kind": "postcondition", "line": 3}, {"kind": "invariant-maintenance", "line": 8}]}
//! ```
//!
//! `expect` is one of `verified`, `incomplete`, `error` and `front-end-error`.
//! Pinned errors must all be reported; other errors may accompany them.

use super::{verify_file, DriverError, ProgramVerdict, VerifyOptions};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedDiag {
    pub kind: String,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub file: String,
    pub expect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<ExpectedDiag>,
    /// Where the pinned outcome knowingly differs from the reference
    /// behaviour; shown next to the result.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<String>,
}

impl CorpusEntry {
    pub fn pinned(&self) -> Vec<ExpectedDiag> {
        let mut v = self.errors.clone();
        if let (Some(kind), Some(line)) = (&self.kind, self.line) {
            v.push(ExpectedDiag {
                kind: kind.clone(),
                line,
            });
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusOutcome {
    pub file: String,
    pub passed: bool,
    pub verdict: ProgramVerdict,
    /// Why the entry failed, or the deviation note.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub outcomes: Vec<CorpusOutcome>,
}

impl CorpusSummary {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.outcomes.len() - self.passed()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read manifest {path}: {source}")]
    Manifest {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: bad manifest entry: {message}")]
    Entry {
        path: String,
        line: usize,
        message: String,
    },
    #[error("manifest and directory disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Driver(#[from] DriverError),
}

pub fn read_manifest(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Manifest {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| CorpusError::Entry {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let e: CorpusEntry = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        if !["verified", "incomplete", "error", "front-end-error"].contains(&e.expect.as_str()) {
            return Err(bad(format!("unknown expectation `{}`", e.expect)));
        }
        out.push(e);
    }
    Ok(out)
}

fn program_files(dir: &Path) -> Result<BTreeSet<String>, CorpusError> {
    let rd = std::fs::read_dir(dir).map_err(|source| CorpusError::Manifest {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(rd
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "dfy"))
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect())
}

/// Verifies every program in `dir` and compares with the manifest.
pub fn run_corpus(dir: &Path, manifest: &Path, opts: &VerifyOptions) -> Result<CorpusSummary, CorpusError> {
    let entries = read_manifest(manifest)?;
    let on_disk = program_files(dir)?;
    let listed: BTreeSet<String> = entries.iter().map(|e| e.file.clone()).collect();
    if listed.len() != entries.len() {
        return Err(CorpusError::Mismatch("a file is listed twice".into()));
    }
    let unlisted: Vec<&String> = on_disk.difference(&listed).collect();
    let missing: Vec<&String> = listed.difference(&on_disk).collect();
    if !unlisted.is_empty() || !missing.is_empty() {
        return Err(CorpusError::Mismatch(format!(
            "not in manifest: {unlisted:?}; not on disk: {missing:?}"
        )));
    }
    let mut summary = CorpusSummary::default();
    for e in &entries {
        let path: PathBuf = dir.join(&e.file);
        let report = verify_file(&path, opts)?;
        let expected = match e.expect.as_str() {
            "verified" => ProgramVerdict::Verified,
            "incomplete" => ProgramVerdict::Incomplete,
            "error" => ProgramVerdict::Errors,
            _ => ProgramVerdict::FrontEndErrors,
        };
        let sites = report.error_sites();
        let absent: Vec<String> = e
            .pinned()
            .into_iter()
            .filter(|p| !sites.iter().any(|(k, l)| k == &p.kind && *l == p.line))
            .map(|p| format!("{}@{}", p.kind, p.line))
            .collect();
        let mut problems = Vec::new();
        if report.verdict != expected {
            problems.push(format!("expected {}, got {}", e.expect, report.verdict.as_str()));
        }
        if !absent.is_empty() {
            let got: Vec<String> = sites.iter().map(|(k, l)| format!("{k}@{l}")).collect();
            problems.push(format!("missing {} (reported {})", absent.join(", "), got.join(", ")));
        }
        let passed = problems.is_empty();
        let note = if passed {
            e.deviation.as_ref().map(|d| format!("deviation: {d}"))
        } else {
            Some(problems.join("; "))
        };
        summary.outcomes.push(CorpusOutcome {
            file: e.file.clone(),
            passed,
            verdict: report.verdict,
            note,
            wall_ms: report.wall_ms,
        });
    }
    Ok(summary)
}
