//! Builders producing special CSPD machines for families of groups and
//! for combinations of existing machines.

pub mod program;

pub use program::spec_alphabet;
mod bounded;
mod direct;
mod free;
mod ht;
mod replay;
mod vf;
mod wreath;

pub use bounded::{build_bounded_automata, tree_letter};
pub use direct::product_direct;
pub use free::product_free;
pub use ht::{build_higman_thompson, ht_letter, ht_root};
pub use replay::{extend_finite, rewrite_generators};
pub use vf::build_virtually_free;
pub use wreath::product_wreath;

#[cfg(test)]
mod tests;
