use std::io::BufRead;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use super::{BatchSource, DataBatch, DataError, RawBatch, StreamError};

/// Counters collected while a stream runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamStats {
    pub batches: u64,
    pub records: u64,
    /// Most batches split off but not yet fully processed at any instant.
    pub peak_in_flight: usize,
    /// Most threads inside the splitter at once; 1 for any non-empty stream.
    pub peak_splitters: usize,
}

#[derive(Default)]
struct Gauge {
    now: AtomicUsize,
    peak: AtomicUsize,
}

impl Gauge {
    fn enter(&self) {
        let now = self.now.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
    }

    fn leave(&self) {
        self.now.fetch_sub(1, Ordering::SeqCst);
    }
}

struct Shared<'a, R, E> {
    source: Mutex<&'a mut BatchSource<R>>,
    stop: AtomicBool,
    /// Failure with the lowest record ordinal seen so far.
    failure: Mutex<Option<(u64, StreamError<E>)>>,
    in_flight: Gauge,
    splitters: Gauge,
    batches: AtomicUsize,
}

impl<R, E> Shared<'_, R, E> {
    fn fail(&self, origin: u64, error: StreamError<E>) {
        self.stop.store(true, Ordering::SeqCst);
        let mut slot = self.failure.lock().unwrap();
        if slot.as_ref().is_none_or(|(o, _)| origin < *o) {
            *slot = Some((origin, error));
        }
    }
}

/// Splits `source` into batches and folds them on `workers` threads.
///
/// Each worker owns one accumulator created by `init`; the accumulators are
/// returned in worker order and must be merged by the caller. Splitting is
/// serialized, parsing and folding run concurrently. On failure no further
/// batches are split, every batch already split is still processed, and the
/// failure at the lowest record ordinal is returned, so the reported error
/// does not depend on scheduling.
pub fn fold_batches<R, A, E, I, F>(
    source: &mut BatchSource<R>,
    workers: usize,
    init: I,
    fold: F,
) -> Result<(Vec<A>, StreamStats), StreamError<E>>
where
    R: BufRead + Send,
    A: Send,
    E: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &DataBatch) -> Result<(), E> + Sync,
{
    let schema = source.schema().clone();
    let start = source.records_read();
    let shared = Shared {
        source: Mutex::new(source),
        stop: AtomicBool::new(false),
        failure: Mutex::new(None),
        in_flight: Gauge::default(),
        splitters: Gauge::default(),
        batches: AtomicUsize::new(0),
    };

    let split = |shared: &Shared<'_, R, E>| -> Option<RawBatch> {
        let mut source = shared.source.lock().unwrap();
        if shared.stop.load(Ordering::SeqCst) {
            return None;
        }
        shared.splitters.enter();
        let next = source.records_read();
        let result = source.split_raw();
        shared.splitters.leave();
        match result {
            Ok(Some(raw)) => {
                shared.in_flight.enter();
                Some(raw)
            }
            Ok(None) => {
                shared.stop.store(true, Ordering::SeqCst);
                None
            }
            Err(e) => {
                shared.fail(next, e.into());
                None
            }
        }
    };

    let accumulators: Vec<A> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers.max(1))
            .map(|i| {
                let (shared, schema, init, fold) = (&shared, &schema, &init, &fold);
                std::thread::Builder::new()
                    .name(format!("clgbn-stream-{i}"))
                    .spawn_scoped(scope, move || {
                        let mut acc = init();
                        while let Some(raw) = split(shared) {
                            let origin = raw.origin();
                            match raw.parse(schema) {
                                Ok(batch) => {
                                    if let Err(error) = fold(&mut acc, &batch) {
                                        shared.fail(origin, StreamError::Task { origin, error });
                                    }
                                }
                                Err(e) => shared.fail(origin, StreamError::Data(e)),
                            }
                            shared.batches.fetch_add(1, Ordering::SeqCst);
                            shared.in_flight.leave();
                        }
                        acc
                    })
                    .expect("failed to spawn stream worker")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    });

    if let Some((_, error)) = shared.failure.into_inner().unwrap() {
        return Err(error);
    }
    let source = shared.source.into_inner().unwrap();
    let stats = StreamStats {
        batches: shared.batches.into_inner() as u64,
        records: source.records_read() - start,
        peak_in_flight: shared.in_flight.peak.into_inner(),
        peak_splitters: shared.splitters.peak.into_inner(),
    };
    Ok((accumulators, stats))
}

/// Runs `action` on every batch, concurrently on `workers` threads.
pub fn for_each_batch<R, E, F>(
    source: &mut BatchSource<R>,
    workers: usize,
    action: F,
) -> Result<StreamStats, StreamError<E>>
where
    R: BufRead + Send,
    E: Send,
    F: Fn(&DataBatch) -> Result<(), E> + Sync,
{
    fold_batches(source, workers, || (), |_, b| action(b)).map(|(_, stats)| stats)
}

/// Convenience for streams whose per-batch task cannot fail.
pub fn collect_batches<R: BufRead + Send>(
    source: &mut BatchSource<R>,
    workers: usize,
) -> Result<(Vec<DataBatch>, StreamStats), DataError> {
    let (parts, stats) = fold_batches(source, workers, Vec::new, |acc: &mut Vec<DataBatch>, b| {
        acc.push(b.clone());
        Ok::<(), std::convert::Infallible>(())
    })
    .map_err(|e| match e {
        StreamError::Data(d) => d,
        StreamError::Task { error, .. } => match error {},
    })?;
    let mut batches: Vec<DataBatch> = parts.into_iter().flatten().collect();
    batches.sort_by_key(DataBatch::origin);
    Ok((batches, stats))
}
