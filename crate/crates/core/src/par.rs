//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over the current rayon
//! pool; without it, or with [`Execution::Sequential`], the same chunks are
//! processed in order on the calling thread. Reductions are required to be
//! associative, and every caller in this crate uses reductions that are also
//! commutative, so both modes return identical results.

use std::ops::Range;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Splits `0..n` into chunks of `chunk` indices, maps each chunk and folds the
/// results with `reduce`.
pub fn chunked_reduce<T, M, R>(exec: Execution, n: u64, chunk: u64, identity: T, map: M, reduce: R) -> T
where
    T: Send + Sync + Clone,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = n.div_ceil(chunk);
    let range_of = |k: u64| k * chunk..((k + 1) * chunk).min(n);

    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..chunks)
            .into_par_iter()
            .map(|k| map(range_of(k)))
            .reduce(|| identity.clone(), &reduce);
    }
    let _ = exec;
    (0..chunks).fold(identity, |acc, k| reduce(acc, map(range_of(k))))
}

/// Maps every index in `0..n` and collects the results in index order.
pub fn map_collect<T, M>(exec: Execution, n: usize, map: M) -> Vec<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(map).collect();
    }
    let _ = exec;
    (0..n).map(map).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for exec in [Execution::Parallel, Execution::Sequential] {
            let s = chunked_reduce(exec, 10_001, 97, 0u64, |r| r.sum::<u64>(), |a, b| a + b);
            assert_eq!(s, 10_000 * 10_001 / 2);
            let v = map_collect(exec, 50, |i| i * i);
            assert_eq!(v[7], 49);
        }
        assert_eq!(chunked_reduce(Execution::Parallel, 0, 8, 5u64, |_| 1, |a, b| a + b), 5);
    }
}
