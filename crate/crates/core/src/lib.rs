//! Numerical core for discovering reproducible physiological correlates of
//! self-reported arousal.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the whole pure part
//! of the pipeline:
//!
//! * [`dataset`]: analysis windows, response computation and design assembly.
//! * [`rr`]: R-peak detection, RR series construction and uniform resampling.
//! * [`eda`]: electrodermal normalization, decimation and convex decomposition
//!   into tonic, phasic and sudomotor-driver components.
//! * [`features`]: the 162-entry feature registry and every extractor.
//! * [`trex`]: FDR-controlled variable selection with dummy-augmented,
//!   early-terminated random experiments and dependency-aware penalization.
//! * [`mixed`]: random-intercept mixed models (REML and a Huber-weighted
//!   robust variant) with Benjamini-Hochberg adjustment.
//! * [`synth`]: synthetic designs with known support and the empirical FDR
//!   benchmark.
//!
//! File formats, configuration loading, the command line and thread pools
//! live in the `physiosel` companion crate.
//!
//! # `no_std` support
//!
//! The crate is `#![no_std]`. The optional `std` feature only adds
//! `std::error::Error` for [`Error`].

#![no_std]
// `!(x > 0.0)` guards deliberately reject NaN; index loops mirror the maths
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

pub mod dataset;
pub mod eda;
pub mod error;
pub mod exec;
pub mod features;
pub mod fft;
pub mod filter;
pub mod linalg;
pub mod mixed;
pub mod pipeline;
pub mod rr;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod trex;

pub use error::{Error, Result, Warning};
pub use exec::{Executor, Sequential};
