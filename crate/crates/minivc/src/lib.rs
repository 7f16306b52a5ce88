// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! `minivc` verifies programs written in a small annotated imperative
//! language: methods with contracts, loop invariants, lemmas, calculations,
//! arrays, sequences, multisets and algebraic datatypes.
//!
//! The pipeline is `syntax` → `resolve` → `vcgen` + `termination` → `smt`,
//! orchestrated by `driver`. The `interp` module runs the executable part of
//! a program and is used as a test oracle.

pub mod diagnostics;
pub mod span;
pub mod syntax;
pub mod resolve;
pub mod termination;
pub mod vcgen;
pub mod interp;
pub mod smt;
pub mod driver;
