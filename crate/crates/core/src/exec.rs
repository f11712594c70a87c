//! Data-parallel execution of seeded sweeps. Every case is derived from its
//! own seed, so results are identical regardless of scheduling; the
//! `parallel` feature (default) fans cases out over rayon, and the
//! sequential path is always available for comparison.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..count`, collecting results in index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(count, f)
    }
}

/// Sequential reference implementation of `map_indexed`.
pub fn map_indexed_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: usize| (i as u64).wrapping_mul(0x9e3779b97f4a7c15);
        assert_eq!(map_indexed(1000, f), map_indexed_seq(1000, f));
    }
}
