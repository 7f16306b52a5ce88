// The guide lives in book/ as mdbook chapters. Each chapter is pulled in as
// the docs of an empty module so that `cargo test --doc` runs its examples.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/contracts.md")]
pub mod contracts {}

#[doc = include_str!("../../../book/src/lemmas.md")]
pub mod lemmas {}

#[doc = include_str!("../../../book/src/termination.md")]
pub mod termination {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/interpreter.md")]
pub mod interpreter {}

#[doc = include_str!("../../../book/src/corpus.md")]
pub mod corpus {}
