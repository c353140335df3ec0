//! Data-parallel learning and inference for conditional linear Gaussian
//! (CLG) Bayesian networks.
//!
//! The crate is organised around a handful of immutable data structures that
//! can be shared freely between worker threads:
//!
//! * [`model`] holds variables, the parent-set DAG, conditional
//!   distributions and the compound sufficient-statistics vectors.
//! * [`data`] streams fixed-size batches out of a text dataset, splitting the
//!   file on a single thread and processing batches concurrently.
//! * [`mle`] computes maximum likelihood parameters as a map-reduce over the
//!   batch stream.
//! * [`sampling`] answers expectation and event queries with likelihood
//!   weighting, reproducibly for any number of workers.
//! * [`greedy`] is a generic parallel greedy search, instantiated as wrapper
//!   feature-subset selection.
//! * [`synthetic`] and [`bench`] generate the super-parent benchmark network
//!   and run the core-count / batch-size sweeps.

pub mod bench;
pub mod data;
pub mod greedy;
pub mod mle;
pub mod model;
pub mod sampling;
pub mod synthetic;

mod pool;

pub use data::{open_dataset, BatchSource, DataBatch, DataError, DataSchema};
pub use mle::{compute_mle, MleConfig, MleError};
pub use pool::available_workers;
pub use model::{
    BayesianNetwork, CompoundVector, ConditionalDistribution, DagBuilder, DataInstance,
    ModelError, ParentSetDag, Variable, VariableKind,
};
