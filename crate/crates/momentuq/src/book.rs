//! Doctest glue for the guide: every chapter's code blocks compile and run
//! with `cargo test --doc`, keeping the book in sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/random-space.md")]
mod random_space {}

#[doc = include_str!("../../../book/src/closures.md")]
mod closures {}

#[doc = include_str!("../../../book/src/solvers.md")]
mod solvers {}

#[doc = include_str!("../../../book/src/adaptivity.md")]
mod adaptivity {}

#[doc = include_str!("../../../book/src/collocation.md")]
mod collocation {}

#[doc = include_str!("../../../book/src/harness.md")]
mod harness {}
