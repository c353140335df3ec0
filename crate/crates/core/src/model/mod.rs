//! Variables, DAG structure, CLG network parameters and sufficient statistics.

mod dag;
mod distribution;
mod error;
pub mod exact;
mod io;
mod learn;
mod network;
mod variable;
mod vector;

pub use dag::{DagBuilder, ParentSet, ParentSetDag};
pub use distribution::{
    ClgDistribution, ConditionalDistribution, LocalLayout, MultinomialTable, VARIANCE_FLOOR,
};
pub use error::ModelError;
pub use io::{read_model, read_structure, write_model};
pub use learn::{moments_to_parameters, RIDGE};
pub use network::{BayesianNetwork, Violation, ViolationKind};
pub use variable::{DataInstance, Variable, VariableKind};
pub use vector::{CompoundAccumulator, CompoundVector, IndexedElement};
