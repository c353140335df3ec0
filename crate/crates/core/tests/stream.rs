mod common;

use std::sync::Mutex;

use clgbn::data::{collect_batches, for_each_batch, open_dataset, read_all, DataError, StreamError};
use proptest::prelude::*;

use common::*;

fn numbered(dir: &std::path::Path, n: usize) -> std::path::PathBuf {
    write_dataset(dir, "d.csv", "k:cont,b:disc(3)", (0..n).map(|i| format!("{i},{}", i % 3)))
}

#[test]
fn header_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_dataset(dir.path(), "a.csv", "a:disc(2),b:cont", []);
    let source = open_dataset(&p, 10).unwrap();
    assert_eq!(source.schema().header(), "a:disc(2),b:cont");
    for bad in ["a:disc(1)", "a:cont,a:cont", "a:real", "", "a:disc(x)"] {
        let p = write_dataset(dir.path(), "bad.csv", bad, []);
        assert!(matches!(open_dataset(&p, 10), Err(DataError::Header(_))), "{bad}");
    }
    assert!(matches!(open_dataset(dir.path().join("missing.csv"), 10), Err(DataError::Open { .. })));
}

#[test]
fn batches_concatenate_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = numbered(dir.path(), 1234);
    let expected = sequential_read(&p);
    for b in [1, 7, 1000] {
        let mut source = open_dataset(&p, b).unwrap();
        let mut rows = Vec::new();
        let mut sizes = Vec::new();
        while let Some(batch) = source.try_split().unwrap() {
            assert_eq!(batch.origin(), rows.len() as u64);
            sizes.push(batch.len());
            rows.extend(batch_rows(&batch));
        }
        assert_eq!(rows, expected);
        assert!(sizes[..sizes.len() - 1].iter().all(|&s| s == b));
    }
}

#[test]
fn delivery_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let p = numbered(dir.path(), 5003);
    let mut reference = None;
    for workers in [1, 2, 4, 8] {
        let mut source = open_dataset(&p, 100).unwrap();
        let (batches, stats) = collect_batches(&mut source, workers).unwrap();
        let origins: Vec<u64> = batches.iter().map(|b| b.origin()).collect();
        assert_eq!(origins, (0..51).map(|i| i * 100).collect::<Vec<_>>());
        assert_eq!(stats.records, 5003);
        assert_eq!(stats.peak_splitters, 1);
        assert!(stats.peak_in_flight <= workers + 2);
        match &reference {
            None => reference = Some(batches),
            Some(r) => assert_eq!(r, &batches),
        }
    }
}

#[test]
fn resident_batches_stay_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let p = numbered(dir.path(), 20_000);
    let resident = Mutex::new((0usize, 0usize));
    let mut source = open_dataset(&p, 50).unwrap();
    for_each_batch(&mut source, 4, |b| {
        {
            let mut r = resident.lock().unwrap();
            r.0 += b.len();
            r.1 = r.1.max(r.0);
        }
        std::thread::yield_now();
        resident.lock().unwrap().0 -= b.len();
        Ok::<_, ()>(())
    })
    .unwrap();
    assert!(resident.into_inner().unwrap().1 <= (4 + 2) * 50);
}

#[test]
fn advance_reads_one_record_at_a_time() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_dataset(dir.path(), "a.csv", "a:disc(2),b:cont", ["1,0.5".to_string()]);
    let mut source = open_dataset(&p, 10).unwrap();
    let mut seen = Vec::new();
    assert!(source.try_advance(|x| seen.push(x.to_vec())).unwrap());
    assert!(!source.try_advance(|x| seen.push(x.to_vec())).unwrap());
    assert_eq!(seen, vec![vec![1.0, 0.5]]);

    let p = write_dataset(dir.path(), "b.csv", "a:disc(2),b:cont", ["2,0.5".to_string()]);
    let mut source = open_dataset(&p, 10).unwrap();
    assert!(matches!(source.try_advance(|_| {}), Err(DataError::Parse { line: 2, .. })));
}

#[test]
fn malformed_lines_abort_the_stream() {
    let dir = tempfile::tempdir().unwrap();
    for bad in ["1", "1,2,3", "x,0", "1,nan"] {
        let rows = (0..30).map(|i| if i == 20 { bad.to_string() } else { format!("{i},1") });
        let p = write_dataset(dir.path(), "bad.csv", "k:cont,b:disc(3)", rows);
        for workers in [1, 4] {
            let mut source = open_dataset(&p, 4).unwrap();
            let err = for_each_batch(&mut source, workers, |_| Ok::<_, ()>(())).unwrap_err();
            assert!(matches!(err, StreamError::Data(DataError::Parse { line: 22, .. })), "{bad}: {err:?}");
        }
    }
}

#[test]
fn crlf_and_blank_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("crlf.csv");
    std::fs::write(&p, "a:cont\r\n1.5\r\n\r\n-2\r\n").unwrap();
    let mut source = open_dataset(&p, 10).unwrap();
    assert_eq!(read_all(&mut source).unwrap().values(), &[1.5, -2.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_property(n in 0usize..300, b in 1usize..40, workers in 1usize..6) {
        let dir = tempfile::tempdir().unwrap();
        let p = numbered(dir.path(), n);
        let mut source = open_dataset(&p, b).unwrap();
        let (batches, stats) = collect_batches(&mut source, workers).unwrap();
        prop_assert_eq!(stats.records as usize, n);
        let rows: Vec<Vec<f64>> = batches.iter().flat_map(batch_rows).collect();
        prop_assert_eq!(rows, sequential_read(&p));
        for (i, batch) in batches.iter().enumerate() {
            prop_assert_eq!(batch.origin() as usize, i * b);
            if i + 1 < batches.len() {
                prop_assert_eq!(batch.len(), b);
            } else {
                prop_assert!((1..=b).contains(&batch.len()));
            }
        }
    }
}
