//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature (default) items run on a rayon pool; `jobs`
//! caps the thread count. Without it, or through [`map_sequential`], items run
//! in order on the calling thread. Both paths return identical results since
//! each item is computed independently.

/// Map `f` over `items`, keeping input order.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    match jobs {
        Some(1) => map_sequential(items, f),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                items.par_iter().map(&f).collect()
            }
        },
        None => items.par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], _jobs: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_sequential(items, f)
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Whether [`map`] can actually fan out.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..257).collect();
        let out = map(&items, Some(4), |x| x * x);
        assert_eq!(out, map_sequential(&items, |x| x * x));
        assert_eq!(map(&items, None, |x| x + 1)[256], 257);
    }
}
