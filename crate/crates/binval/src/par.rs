//! Data-parallel helpers with sequential twins.
//!
//! With the `parallel` feature (the default) these run on the current rayon
//! thread pool; without it they run on the calling thread. Callers are
//! written so that both paths produce identical results: parallel reductions
//! only ever merge values under associative, order-insensitive operations
//! (integer sums, element-wise maxima, index-tagged collection).

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over a range, collecting results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    range.map(f).collect()
}

/// Fold a range into an accumulator. `step` absorbs one index into an
/// accumulator and `merge` combines two accumulators; `merge` must be
/// associative and commutative for the two backends to agree.
#[cfg(feature = "parallel")]
pub(crate) fn fold_range<A, I, S, M>(range: Range<usize>, identity: I, step: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(A, usize) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    range.into_par_iter().fold(&identity, &step).reduce(&identity, &merge)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fold_range<A, I, S, M>(range: Range<usize>, identity: I, step: S, _merge: M) -> A
where
    I: Fn() -> A,
    S: Fn(A, usize) -> A,
    M: Fn(A, A) -> A,
{
    range.fold(identity(), step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_index_order() {
        assert_eq!(map_range(0..5, |i| i * i), vec![0, 1, 4, 9, 16]);
        assert_eq!(map_range(3..3, |i| i), Vec::<usize>::new());
    }

    #[test]
    fn fold_sums_exactly() {
        let total = fold_range(0..1000, || 0u64, |acc, i| acc + i as u64, |a, b| a + b);
        assert_eq!(total, 499_500);
    }

    #[test]
    fn fold_merges_vectors() {
        let hist = fold_range(
            0..100,
            || vec![0u32; 4],
            |mut acc, i| {
                acc[i % 4] += 1;
                acc
            },
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
        assert_eq!(hist, vec![25; 4]);
    }
}
