//! MLE timing sweeps and the batch-pipeline concurrency bound.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::data::open_dataset;
use crate::mle::{compute_mle, MleConfig, MleError};
use crate::model::{write_model, BayesianNetwork, ParentSetDag};

pub const CSV_HEADER: &str = "sweep,value,median_ms,workers,batch_size,n,param_hash";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("load time must be positive and finite, got {0}")]
    LoadTime(f64),

    #[error("process time must be non-negative and finite, got {0}")]
    ProcessTime(f64),

    #[error("unknown sweep `{0}`; expected `workers` or `batch-size`")]
    UnknownSweep(String),

    #[error("need at least one value and one repetition")]
    Empty,

    #[error(transparent)]
    Mle(#[from] MleError),
}

/// Most cores busy at once when loading a batch takes `load` and processing
/// it takes `process`, with loads serialized: `⌊P/L⌋ + 1`.
pub fn parallel_limit(process: f64, load: f64) -> Result<u64, BenchError> {
    if !(load.is_finite() && load > 0.0) {
        return Err(BenchError::LoadTime(load));
    }
    if !(process.is_finite() && process >= 0.0) {
        return Err(BenchError::ProcessTime(process));
    }
    Ok((process / load).floor() as u64 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Workers,
    BatchSize,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Workers => "workers",
            SweepKind::BatchSize => "batch-size",
        })
    }
}

impl FromStr for SweepKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "workers" | "cores" => Ok(SweepKind::Workers),
            "batch-size" | "batch_size" | "batch" => Ok(SweepKind::BatchSize),
            other => Err(BenchError::UnknownSweep(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub sweep: SweepKind,
    pub value: usize,
    pub median_ms: f64,
    pub workers: usize,
    pub batch_size: usize,
    pub n: u64,
    pub param_hash: String,
}

/// SHA-256 of the serialized model, in hex.
pub fn parameter_hash(bn: &BayesianNetwork) -> String {
    Sha256::digest(write_model(bn).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs MLE over `data` once per repetition for every value of the swept
/// parameter and reports the median wall time. Opening and reading the file
/// is part of the timed region. Runs are strictly sequential.
pub fn bench_sweep(
    data: &Path,
    dag: &ParentSetDag,
    sweep: SweepKind,
    values: &[usize],
    repetitions: usize,
    base: MleConfig,
) -> Result<Vec<BenchRow>, BenchError> {
    if values.is_empty() || repetitions == 0 {
        return Err(BenchError::Empty);
    }
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let config = match sweep {
            SweepKind::Workers => MleConfig { workers: value, ..base },
            SweepKind::BatchSize => MleConfig { batch_size: value, ..base },
        };
        let mut times = Vec::with_capacity(repetitions);
        let mut hash = String::new();
        let mut n = 0;
        for _ in 0..repetitions {
            let start = Instant::now();
            let mut source = open_dataset(data, config.batch_size).map_err(MleError::from)?;
            let bn = compute_mle(&mut source, dag, &config)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            n = source.records_read();
            hash = parameter_hash(&bn);
        }
        rows.push(BenchRow {
            sweep,
            value,
            median_ms: median(&mut times),
            workers: config.workers,
            batch_size: config.batch_size,
            n,
            param_hash: hash,
        });
    }
    Ok(rows)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.3},{},{},{},{}",
            r.sweep, r.value, r.median_ms, r.workers, r.batch_size, r.n, r.param_hash
        )?;
    }
    Ok(())
}
