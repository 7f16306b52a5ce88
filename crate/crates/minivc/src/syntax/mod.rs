// Copyright (c) The minivc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lexing, parsing and pretty printing.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::*;
pub use parser::{parse, parse_expr, parse_stmts};
pub use pretty::{expr_to_string, pretty_print, program_to_string, Node};
