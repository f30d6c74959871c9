//! Runs every code listing in `book/` as a doc-test, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/curves.md")]
pub mod curves {}
#[doc = include_str!("../../../book/src/monopoly.md")]
pub mod monopoly {}
#[doc = include_str!("../../../book/src/whitespace.md")]
pub mod whitespace {}
#[doc = include_str!("../../../book/src/duopoly.md")]
pub mod duopoly {}
#[doc = include_str!("../../../book/src/competition.md")]
pub mod competition {}
#[doc = include_str!("../../../book/src/investment.md")]
pub mod investment {}
#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}
