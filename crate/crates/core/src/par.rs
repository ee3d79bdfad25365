//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the map runs on rayon; the `SWIPT_THREADS`
//! environment variable caps the worker count. Without the feature, or with
//! [`Execution::Sequential`], items run in index order on the calling thread.
//! Results are identical either way.

/// Environment variable limiting worker threads.
pub const THREADS_ENV: &str = "SWIPT_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Worker cap from `SWIPT_THREADS`, ignoring unset, zero or malformed values.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Parallel => parallel_map(n, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect();
    match thread_cap() {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree_and_keep_order() {
        let f = |i: usize| (i as f64).sqrt() * 3.0;
        let a = map_indexed(1000, Execution::Parallel, f);
        let b = map_indexed(1000, Execution::Sequential, f);
        assert_eq!(a, b);
        assert_eq!(a[49], 21.0);
    }

    #[test]
    fn empty_input() {
        assert!(map_indexed(0, Execution::Parallel, |i| i).is_empty());
    }
}
