//! Data-parallel helpers with a sequential fallback.
//!
//! Every Monte Carlo loop in the crate is split into fixed-size blocks, each
//! driven by its own ChaCha stream keyed by `(seed, stream)`. Block results are
//! always combined in block order, so results are bit-identical whether the
//! blocks ran on one thread or many, and whether or not the `parallel`
//! feature is enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of Monte Carlo samples per independent stream.
pub const BLOCK: usize = 8192;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is on; sequential otherwise.
    #[default]
    Parallel,
}

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_range<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..len).map(f).collect(),
        Execution::Parallel => parallel_map(len, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Deterministic RNG for one stream of a seeded computation.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent child seed for sub-computation `stream` of a seeded run.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    use rand::RngCore;
    stream_rng(seed, stream).next_u64()
}

/// Splits `count` items into `(start, len)` blocks of at most [`BLOCK`].
pub fn blocks(count: usize) -> Vec<(usize, usize)> {
    (0..count.div_ceil(BLOCK))
        .map(|b| {
            let start = b * BLOCK;
            (start, BLOCK.min(count - start))
        })
        .collect()
}
