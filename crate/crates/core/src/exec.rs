//! Execution-mode switch for the data-parallel inner loops.
//!
//! Column-wise work (decoding, gap scans) is independent per column, so the
//! same closure can run sequentially or on the rayon pool. Without the
//! `parallel` feature both modes run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to drive a per-column loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Maps `f` over `0..len` with a per-worker scratch value from `init`.
/// Output order matches the index order in both modes.
pub(crate) fn map_indexed<S, T, I, F>(exec: Exec, len: usize, init: I, f: F) -> Vec<T>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
    T: Send,
{
    match exec {
        Exec::Sequential => {
            let mut scratch = init();
            (0..len).map(|i| f(&mut scratch, i)).collect()
        }
        Exec::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..len)
                    .into_par_iter()
                    .map_init(&init, |scratch, i| f(scratch, i))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                let mut scratch = init();
                (0..len).map(|i| f(&mut scratch, i)).collect()
            }
        }
    }
}

/// Finds the lowest index in `0..len` for which `f` returns `Some`, together
/// with the produced value. Both modes return the same winner.
pub(crate) fn min_index_hit<S, V, I, F>(exec: Exec, len: usize, init: I, f: F) -> Option<(usize, V)>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> Option<V> + Sync + Send,
    V: Send,
{
    match exec {
        Exec::Sequential => {
            let mut scratch = init();
            let mut best: Option<(usize, V)> = None;
            for i in 0..len {
                if let Some(v) = f(&mut scratch, i) {
                    best = Some((i, v));
                    break;
                }
            }
            best
        }
        Exec::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..len)
                    .into_par_iter()
                    .map_init(&init, |scratch, i| f(scratch, i).map(|v| (i, v)))
                    .flatten()
                    .min_by_key(|(i, _)| *i)
            }
            #[cfg(not(feature = "parallel"))]
            {
                let mut scratch = init();
                let mut best: Option<(usize, V)> = None;
                for i in 0..len {
                    if let Some(v) = f(&mut scratch, i) {
                        best = Some((i, v));
                        break;
                    }
                }
                best
            }
        }
    }
}
