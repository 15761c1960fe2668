//! Order-preserving fan-out over independent work items.
//!
//! With the `parallel` feature the items run on the rayon pool; without it
//! they run in a loop. Either way the output vector is in index order, so
//! callers get bit-identical results in both modes.

/// How replicate-level work is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}


/// Evaluates `f(0), f(1), …, f(n-1)` and returns the results in order.
pub fn map_range<R, F>(mode: ExecMode, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_slice<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_range(mode, items.len(), |i| f(&items[i]))
}
