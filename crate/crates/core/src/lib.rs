//! Numerics for the time-space fractional equation `d_t^a w = phi(Delta) w + h`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bernstein;
pub mod error;
pub mod grid;
pub mod harness;
pub mod kernel;
pub mod quad;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
