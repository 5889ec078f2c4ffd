//! Shot-execution strategy: sequential always, rayon data-parallel when
//! the `parallel` feature is enabled.
//!
//! Results never depend on the strategy or thread count: every work item
//! derives its own RNG substream from (seed, index), and reductions are
//! over integer counts.

/// How to distribute independent work items.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// Use the global rayon pool; `0` threads means "all available".
    #[cfg(feature = "parallel")]
    Rayon { threads: usize },
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon { threads: 0 }
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

/// Map `f` over `0..n` and fold the outputs with an associative merge.
/// `identity` must produce a neutral element for `merge`.
pub fn map_reduce<T, I, F, M>(par: Parallelism, n: u64, identity: I, f: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(u64) -> T + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    match par {
        Parallelism::Sequential => (0..n).map(f).fold(identity(), merge),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon { threads } => {
            use rayon::prelude::*;
            let body = || (0..n).into_par_iter().map(&f).reduce(&identity, &merge);
            if threads == 0 {
                body()
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("building rayon pool");
                pool.install(body)
            }
        }
    }
}
