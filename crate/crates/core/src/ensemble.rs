//! Deterministic parallel map over Monte-Carlo replicas.

use rayon::prelude::*;

use crate::random::RngStream;

/// Runs `f` on replicas `0..count`, replica `i` getting stream `(seed, i)`.
/// Results come back in replica order regardless of the thread count.
pub fn map_replicas<R, F>(count: usize, seed: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, RngStream) -> R + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(i, RngStream::new(seed, i as u64)))
        .collect()
}
