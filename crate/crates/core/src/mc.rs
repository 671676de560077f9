//! Deterministic seeded sampling.
//!
//! Every Monte Carlo layer draws each sample from its own counter-based
//! stream keyed by (seed, sample index).  Parallel runs collect results in
//! index order, so reports are bit-identical regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Default sample count for Monte Carlo averages.
pub const DEFAULT_SAMPLES: u64 = 10_000;

/// RNG for one sample.  Stream 0 is reserved for driver-level draws, so
/// sample `index` uses stream `index + 1`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}

/// RNG for draws made by the driver itself, outside any per-sample loop.
pub fn driver_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Map `f` over sample indices 0..count in parallel, collecting results in
/// index order.
pub fn par_map_indexed<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}
