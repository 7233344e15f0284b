//! Index-parallel execution hook.
//!
//! The core never spawns threads. Work that is embarrassingly parallel
//! (random experiments, benchmark repetitions, analysis windows) is routed
//! through an [`Executor`] so that a std caller can plug in a thread pool.
//! Results are always returned in index order, which keeps every reduction
//! deterministic regardless of scheduling.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), f(1), ..., f(n - 1)` and returns the results in order.
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
