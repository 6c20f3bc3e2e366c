//! Fan-out of independent Monte Carlo work units.
//!
//! Each unit `i` receives its own generator `stream_rng(seed, i)`, and results
//! come back in index order, so the parallel and sequential paths produce
//! identical output. With the `parallel` feature disabled everything runs on
//! the calling thread.

use crate::rng::{stream_rng, PrivRng};

/// Run `f(i, rng_i)` for `i in 0..n`, in parallel when the `parallel`
/// feature is enabled.
pub fn map_streams<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut PrivRng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64);
                f(i, &mut rng)
            })
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_streams_seq(seed, n, f)
    }
}

/// Sequential reference path for [`map_streams`].
pub fn map_streams_seq<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    F: Fn(usize, &mut PrivRng) -> T,
{
    (0..n)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            f(i, &mut rng)
        })
        .collect()
}

/// Map over a slice, in parallel when enabled. Output order follows input.
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Run `f` inside a pool of `threads` workers (0 = library default).
/// Without the `parallel` feature this simply calls `f`.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
