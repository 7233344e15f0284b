//! Command-line pipeline around `physiosel-core`: CSV ingestion, the
//! extract, select, fit and report stages, the synthetic FDR benchmark and
//! the SVG figures.

pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;
pub mod svg;
