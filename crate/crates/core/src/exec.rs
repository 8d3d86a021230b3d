//! Deterministic fan-out for independent work units.
//!
//! Monte Carlo loops (trial chunks, bootstrap replicates, per-threshold
//! refits) run through [`map_units`]: each unit is computed independently
//! and the outputs are collected in unit order, so downstream reductions
//! see the same values in the same order no matter how many threads ran.
//! With the `parallel` feature (on by default) units are distributed over
//! the rayon thread pool; without it everything runs on the calling thread.

/// Execution backend for embarrassingly parallel work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Run all units on the calling thread, in order.
    Sequential,
    /// Distribute units across the rayon thread pool.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Execution {
    /// Parallel when compiled in, sequential otherwise.
    pub fn auto() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Default for Execution {
    fn default() -> Self {
        Execution::auto()
    }
}

/// Maps `f` over `0..units`, collecting results in unit order.
///
/// The output is identical for both backends; only wall-clock time differs.
pub fn map_units<T, F>(execution: Execution, units: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    match execution {
        Execution::Sequential => (0..units).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..units).into_par_iter().map(f).collect()
        }
    }
}
