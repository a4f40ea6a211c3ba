//! The guide's chapters, compiled as documentation so every code block in
//! the book runs as a doc-test of this crate. `cargo test --workspace`
//! therefore fails whenever the book drifts from the `compactify` API.
//!
//! One module per chapter keeps test failures attributable: a broken
//! snippet reports the chapter it lives in.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/systems.md")]
pub mod systems {}

#[doc = include_str!("../../../book/src/partitions.md")]
pub mod partitions {}

#[doc = include_str!("../../../book/src/chains.md")]
pub mod chains {}

#[doc = include_str!("../../../book/src/orders.md")]
pub mod orders {}

#[doc = include_str!("../../../book/src/forest.md")]
pub mod forest {}

#[doc = include_str!("../../../book/src/rays.md")]
pub mod rays {}

#[doc = include_str!("../../../book/src/checking.md")]
pub mod checking {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
