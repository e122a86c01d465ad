//! Execution policy for the data-parallel sweeps (mixing-time starts,
//! batch classification, seeded searches, test batteries).
//!
//! With the `parallel` feature the `Parallel` policy fans out over rayon's
//! global pool; without it both policies run sequentially, so callers never
//! need their own `cfg` switches.

use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `op` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], op: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(op).collect()
            }
            _ => items.iter().map(op).collect(),
        }
    }

    /// Maps `op` over an index range, preserving order.
    pub fn map_range<R, F>(self, range: Range<usize>, op: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                range.into_par_iter().map(op).collect()
            }
            _ => range.map(op).collect(),
        }
    }
}
