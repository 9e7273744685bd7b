//! Transience and recurrence of one-dimensional symmetric Lévy processes and
//! random walks.
//!
//! The crate evaluates series and integral criteria for transience, builds an
//! explicit unit flow on the long-range network over ℤ and bounds its energy,
//! solves for effective resistances of truncated networks, discretizes
//! continuous jump laws onto lattices and runs seeded Monte Carlo diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod discretize;
pub mod error;
pub mod measures;
pub mod network;
pub mod quad;
pub mod simulate;
pub mod special;
pub mod verdict;

pub use error::{Error, Result};
