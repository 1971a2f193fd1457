//! Batch parallelism. Each item runs on one thread; results come back in
//! input order, so output does not depend on the thread count.

use rayon::prelude::*;

/// Thread cap from `QCL_THREADS`; unset or invalid means all cores.
pub fn threads() -> usize {
    std::env::var("QCL_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    match rayon::ThreadPoolBuilder::new().num_threads(threads()).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}
