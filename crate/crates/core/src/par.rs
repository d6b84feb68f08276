//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) these dispatch to rayon;
//! without it, or after [`set_parallel(false)`](set_parallel), they run
//! sequentially. Results are always returned in input order, so callers
//! that derive per-item seeds from the item index produce identical output
//! either way.

use std::sync::atomic::{AtomicBool, Ordering};

static ENABLED: AtomicBool = AtomicBool::new(true);

/// Globally enable or disable parallel execution at runtime.
///
/// Has no effect when the crate is built without the `parallel` feature.
pub fn set_parallel(enabled: bool) {
    ENABLED.store(enabled, Ordering::Relaxed);
}

/// Whether the helpers in this module will currently fan out to rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && ENABLED.load(Ordering::Relaxed)
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_range`]; returns the first error by index.
pub fn try_map_range<R, E, F>(n: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_range(n, f).into_iter().collect()
}

/// Evaluate `f` on `0..limit` in chunks of `want`, keeping the `Some`
/// results in index order, until `want` are kept, an item satisfying `stop`
/// is kept, or the range is exhausted. The outcome does not depend on
/// whether chunks run in parallel.
pub fn sample_until<R, E, F, S>(limit: usize, want: usize, f: F, stop: S) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<Option<R>, E> + Sync + Send,
    S: Fn(&R) -> bool,
{
    let mut kept = Vec::with_capacity(want);
    let mut next = 0;
    while kept.len() < want && next < limit {
        let end = (next + want - kept.len()).min(limit);
        for r in try_map_range(end - next, |j| f(next + j))?.into_iter().flatten() {
            let done = stop(&r);
            kept.push(r);
            if done {
                return Ok(kept);
            }
        }
        next = end;
    }
    Ok(kept)
}

/// Mix a base seed with an item index into an independent stream seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
