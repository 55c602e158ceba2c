//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these dispatch to rayon; without it (or when
//! [`Execution::Sequential`] is requested) they run on the calling thread.
//! Results are always returned in index order, so output never depends on the
//! execution mode.

/// How a batch of independent work items is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// True when this mode will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn is_parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Maps `f` over `0..count`, preserving index order.
pub fn map_indexed<U, F>(count: usize, exec: Execution, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<T, U, F>(data: &[T], exec: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return data.par_iter().map(f).collect();
    }
    let _ = exec;
    data.iter().map(f).collect()
}

/// Runs `f` on consecutive chunks of `0..count`. Used by the state-vector
/// kernels, which split their block list and keep one scratch buffer per
/// chunk.
pub(crate) fn for_each_chunk<F>(count: usize, chunk: usize, exec: Execution, f: F)
where
    F: Fn(std::ops::Range<usize>) + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = count.div_ceil(chunk);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && chunks > 1 {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .for_each(|c| f(c * chunk..((c + 1) * chunk).min(count)));
        return;
    }
    let _ = exec;
    for c in 0..chunks {
        f(c * chunk..((c + 1) * chunk).min(count));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_keeps_order_in_both_modes() {
        let par = map_indexed(1000, Execution::Parallel, |i| i * i);
        let seq = map_indexed(1000, Execution::Sequential, |i| i * i);
        assert_eq!(par, seq);
        assert_eq!(par[31], 961);
    }

    #[test]
    fn chunks_cover_range_exactly_once() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let hits: Vec<AtomicUsize> = (0..103).map(|_| AtomicUsize::new(0)).collect();
        for_each_chunk(103, 10, Execution::Parallel, |r| {
            for i in r {
                hits[i].fetch_add(1, Ordering::Relaxed);
            }
        });
        assert!(hits.iter().all(|h| h.load(Ordering::Relaxed) == 1));
    }
}
