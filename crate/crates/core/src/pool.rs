use rayon::{ThreadPool, ThreadPoolBuilder};

/// Runs `op` on a dedicated rayon pool with exactly `workers` threads.
pub(crate) fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    let pool = build(workers);
    pool.install(op)
}

fn build(workers: usize) -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .thread_name(|i| format!("clgbn-worker-{i}"))
        .build()
        .expect("failed to spawn worker pool")
}

/// Number of hardware threads, falling back to one.
pub fn available_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
