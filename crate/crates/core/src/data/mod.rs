//! Batched, lazily loaded access to text datasets.
//!
//! A dataset file starts with a header line of comma-separated column
//! declarations (`name:disc(arity)` or `name:cont`), followed by one record
//! per line. Records are split off in fixed-size batches by a single thread
//! at a time and processed concurrently by a pool of workers.

mod batch;
mod error;
mod schema;
mod source;
mod stream;

pub use batch::{DataBatch, RawBatch};
pub use error::{DataError, StreamError};
pub use schema::{Column, DataSchema};
pub use source::{open_dataset, read_all, BatchSource, DEFAULT_BATCH_SIZE};
pub use stream::{collect_batches, fold_batches, for_each_batch, StreamStats};
