//! Slow, direct reference implementations used only by tests.
//!
//! Nothing here shares code with `physiosel-core`: every routine is written
//! from its definition with plain loops and dense matrices.

pub mod dense;
pub mod entropy;
pub mod graph;
pub mod qp;
