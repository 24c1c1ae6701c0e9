//! mdbook cannot run snippets that depend on workspace crates, so every
//! chapter is pulled in here and checked by `cargo test --doc`. One module
//! per chapter keeps failure locations readable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/residues.md")]
pub mod residues {}
#[doc = include_str!("../../../book/src/groups.md")]
pub mod groups {}
#[doc = include_str!("../../../book/src/setups.md")]
pub mod setups {}
#[doc = include_str!("../../../book/src/profiles.md")]
pub mod profiles {}
#[doc = include_str!("../../../book/src/census.md")]
pub mod census {}
#[doc = include_str!("../../../book/src/analytic.md")]
pub mod analytic {}
#[doc = include_str!("../../../book/src/outer.md")]
pub mod outer {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
