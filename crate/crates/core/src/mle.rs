//! Maximum likelihood estimation as a map-reduce over a batch stream.
//!
//! Each batch is mapped to the sum of the global sufficient statistics of its
//! instances; the batch sums are reduced into `Σ s(x_i)`, divided by the
//! number of instances, and turned into parameters.

use std::io::BufRead;

use thiserror::Error;

use crate::data::{fold_batches, BatchSource, DataBatch, DataError, DataSchema, StreamError, StreamStats};
use crate::model::{
    moments_to_parameters, BayesianNetwork, CompoundAccumulator, CompoundVector, ModelError,
    ParentSetDag,
};

#[derive(Debug, Error)]
pub enum MleError {
    #[error(transparent)]
    Data(#[from] DataError),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("batch starting at record {origin}: {error}")]
    Batch { origin: u64, error: ModelError },

    #[error("dataset does not match the structure: {0}")]
    SchemaMismatch(String),

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("{0} must be at least one")]
    InvalidConfig(&'static str),
}

impl From<StreamError<ModelError>> for MleError {
    fn from(e: StreamError<ModelError>) -> Self {
        match e {
            StreamError::Data(e) => MleError::Data(e),
            StreamError::Task { origin, error } => MleError::Batch { origin, error },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MleConfig {
    pub batch_size: usize,
    pub workers: usize,
    /// Accumulate exactly so that the result does not depend on worker
    /// count, batch size or scheduling. When off, partial sums are plain
    /// `f64` folds merged in whatever order workers finish.
    pub deterministic_reduce: bool,
}

impl Default for MleConfig {
    fn default() -> Self {
        MleConfig {
            batch_size: crate::data::DEFAULT_BATCH_SIZE,
            workers: crate::pool::available_workers(),
            deterministic_reduce: true,
        }
    }
}

impl MleConfig {
    pub fn new(batch_size: usize, workers: usize) -> Self {
        MleConfig {
            batch_size,
            workers,
            deterministic_reduce: true,
        }
    }

    fn check(&self) -> Result<(), MleError> {
        if self.batch_size == 0 {
            return Err(MleError::InvalidConfig("batch size"));
        }
        if self.workers == 0 {
            return Err(MleError::InvalidConfig("worker count"));
        }
        Ok(())
    }
}

/// Sum of the statistics over the whole dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Statistics {
    pub sums: CompoundVector,
    pub n: u64,
    pub stream: StreamStats,
}

/// Learns the parameters of `dag` from every record in `source`.
pub fn compute_mle<R: BufRead + Send>(
    source: &mut BatchSource<R>,
    dag: &ParentSetDag,
    config: &MleConfig,
) -> Result<BayesianNetwork, MleError> {
    let stats = compute_statistics(source, dag, config)?;
    Ok(moments_to_parameters(
        dag,
        &stats.sums.divide_by(stats.n as f64),
        stats.n,
    )?)
}

/// The reduce half of [`compute_mle`]: `Σ s(x_i)` and `n`.
pub fn compute_statistics<R: BufRead + Send>(
    source: &mut BatchSource<R>,
    dag: &ParentSetDag,
    config: &MleConfig,
) -> Result<Statistics, MleError> {
    config.check()?;
    source.set_batch_size(config.batch_size)?;
    let columns = column_map(source.schema(), dag)?;
    let skeleton = BayesianNetwork::with_default_parameters(dag.clone())?;
    let skeleton = &skeleton;
    let columns = columns.as_deref();

    let (sums, n, stream) = if config.deterministic_reduce {
        let (parts, stream) = fold_batches(
            source,
            config.workers,
            || CompoundAccumulator::new(skeleton),
            |acc, batch| accumulate(acc, skeleton, batch, columns),
        )?;
        let mut total = CompoundAccumulator::new(skeleton);
        for part in &parts {
            total.merge(part)?;
        }
        (total.to_vector(), total.count(), stream)
    } else {
        let (parts, stream) = fold_batches(
            source,
            config.workers,
            || (CompoundVector::zero_like(skeleton), 0u64),
            |(acc, n), batch| {
                let mut row = Vec::new();
                for x in batch.iter() {
                    let x = reorder(x, columns, &mut row);
                    acc.add_assign(&skeleton.global_sufficient_statistics(x)?)?;
                }
                *n += batch.len() as u64;
                Ok(())
            },
        )?;
        let mut total = CompoundVector::zero_like(skeleton);
        let mut n = 0;
        for (part, count) in &parts {
            total.add_assign(part)?;
            n += count;
        }
        (total, n, stream)
    };
    if n == 0 {
        return Err(MleError::EmptyDataset);
    }
    Ok(Statistics { sums, n, stream })
}

/// Sum of the global sufficient statistics of every instance in `batch`,
/// which must be laid out in variable-index order.
pub fn sum_batch(bn: &BayesianNetwork, batch: &DataBatch) -> Result<CompoundVector, ModelError> {
    let mut acc = CompoundAccumulator::new(bn);
    accumulate(&mut acc, bn, batch, None)?;
    Ok(acc.to_vector())
}

fn accumulate(
    acc: &mut CompoundAccumulator,
    bn: &BayesianNetwork,
    batch: &DataBatch,
    columns: Option<&[usize]>,
) -> Result<(), ModelError> {
    let mut row = Vec::new();
    for x in batch.iter() {
        acc.add_instance(bn, reorder(x, columns, &mut row))?;
    }
    Ok(())
}

fn reorder<'a>(x: &'a [f64], columns: Option<&[usize]>, row: &'a mut Vec<f64>) -> &'a [f64] {
    match columns {
        None => x,
        Some(columns) => {
            row.clear();
            row.extend(columns.iter().map(|&c| x[c]));
            row
        }
    }
}

/// Column position of each variable, or `None` when columns are already in
/// variable order.
fn column_map(schema: &DataSchema, dag: &ParentSetDag) -> Result<Option<Vec<usize>>, MleError> {
    if schema.len() != dag.len() {
        return Err(MleError::SchemaMismatch(format!(
            "{} columns for {} variables",
            schema.len(),
            dag.len()
        )));
    }
    let mut columns = Vec::with_capacity(dag.len());
    for v in dag.variables() {
        let c = schema
            .position(v.name())
            .ok_or_else(|| MleError::SchemaMismatch(format!("no column for `{}`", v.name())))?;
        let kind = schema.columns()[c].kind;
        if kind != v.kind() {
            return Err(MleError::SchemaMismatch(format!(
                "`{}` is {} in the dataset but {} in the structure",
                v.name(),
                kind,
                v.kind()
            )));
        }
        columns.push(c);
    }
    let identity = columns.iter().enumerate().all(|(i, &c)| i == c);
    Ok((!identity).then_some(columns))
}
