//! The user guide, one module per book chapter.
//!
//! The mdbook sources under `book/src` are included here verbatim, so every
//! fenced Rust snippet in the book compiles and runs under
//! `cargo test --doc -p mginf` — the book cannot drift from the code.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/service-law.md")]
pub mod service_law {}

#[doc = include_str!("../../../book/src/moments.md")]
pub mod moments {}

#[doc = include_str!("../../../book/src/busy-period.md")]
pub mod busy_period {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
