use thiserror::Error;

use crate::data::{DataBatch, DataSchema};
use crate::model::{
    moments_to_parameters, BayesianNetwork, CompoundAccumulator, CompoundVector, DagBuilder,
    ModelError, ParentSetDag,
};

use super::{Candidate, GreedyProblem};

/// Cross-validation folds; instance `i` is tested in fold `i mod FOLDS`.
pub const FOLDS: usize = 5;

/// Pseudo-count added to every class and discrete-feature count.
pub const LAPLACE: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FssError {
    #[error("need at least {FOLDS} instances, found {0}")]
    TooFewInstances(usize),

    #[error("class column `{0}` must be discrete")]
    ContinuousClass(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("invalid feature set: {0}")]
    Features(String),

    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Cross-validated accuracy of naive Bayes on `features`.
///
/// The classifier is the network `class → feature` for every feature:
/// multinomial tables with Laplace smoothing, Gaussian features with one mean
/// and variance per class. Predictions take the most probable class, lowest
/// index on ties. Accuracy is pooled over all folds.
pub fn fss_score(
    schema: &DataSchema,
    data: &DataBatch,
    class: usize,
    features: &[usize],
) -> Result<f64, FssError> {
    let n = data.len();
    if n < FOLDS {
        return Err(FssError::TooFewInstances(n));
    }
    let columns = schema.columns();
    let class_col = columns
        .get(class)
        .ok_or_else(|| FssError::Features(format!("class index {class} out of range")))?;
    let Some(arity) = class_col.kind.arity() else {
        return Err(FssError::ContinuousClass(class_col.name.clone()));
    };
    let mut seen = vec![false; columns.len()];
    seen[class] = true;
    for &f in features {
        if f >= columns.len() || std::mem::replace(&mut seen[f], true) {
            return Err(FssError::Features(format!("feature {f} is out of range, repeated or the class")));
        }
    }

    let mut b = DagBuilder::new();
    let c = b.add_variable(class_col.name.clone(), class_col.kind);
    for &f in features {
        let v = b.add_variable(columns[f].name.clone(), columns[f].kind);
        b.add_parent(v, c);
    }
    let dag = b.build()?;
    let skeleton = BayesianNetwork::with_default_parameters(dag.clone())?;

    // Instance rows projected onto [class, features...].
    let project = |x: &[f64], row: &mut Vec<f64>| {
        row.clear();
        row.push(x[class]);
        row.extend(features.iter().map(|&f| x[f]));
    };

    let mut folds: Vec<CompoundAccumulator> =
        (0..FOLDS).map(|_| CompoundAccumulator::new(&skeleton)).collect();
    let mut row = Vec::with_capacity(features.len() + 1);
    for (i, x) in data.iter().enumerate() {
        project(x, &mut row);
        folds[i % FOLDS].add_instance(&skeleton, &row)?;
    }

    let mut correct = 0usize;
    for k in 0..FOLDS {
        let mut train = CompoundAccumulator::new(&skeleton);
        for (j, fold) in folds.iter().enumerate() {
            if j != k {
                train.merge(fold)?;
            }
        }
        let model = fit(&dag, &skeleton, &train)?;
        for (i, x) in data.iter().enumerate().skip(k).step_by(FOLDS) {
            debug_assert_eq!(i % FOLDS, k);
            project(x, &mut row);
            let truth = row[0];
            let mut best = (f64::NEG_INFINITY, 0usize);
            for state in 0..arity {
                row[0] = state as f64;
                let score = model.log_density(&row)?;
                if score > best.0 {
                    best = (score, state);
                }
            }
            if best.1 as f64 == truth {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / n as f64)
}

fn fit(
    dag: &ParentSetDag,
    skeleton: &BayesianNetwork,
    train: &CompoundAccumulator,
) -> Result<BayesianNetwork, ModelError> {
    let n = train.count();
    let sums = train.to_vector();
    let smoothed = CompoundVector::new(
        sums.elements()
            .iter()
            .zip(skeleton.distributions())
            .map(|(e, d)| {
                let mut e = e.clone();
                if d.main_var().is_discrete() {
                    e.local.iter_mut().for_each(|v| *v += LAPLACE);
                }
                e
            })
            .collect(),
    )?;
    moments_to_parameters(dag, &smoothed.divide_by(n as f64), n)
}

/// Selected features and their score.
#[derive(Debug, Clone, PartialEq)]
pub struct FssState {
    pub selected: Vec<usize>,
    pub score: f64,
}

/// Wrapper feature-subset selection over an in-memory dataset.
#[derive(Debug, Clone)]
pub struct FssProblem {
    schema: DataSchema,
    data: DataBatch,
    class: usize,
}

impl FssProblem {
    pub fn new(schema: DataSchema, data: DataBatch, class_name: &str) -> Result<Self, FssError> {
        let class = schema
            .position(class_name)
            .ok_or_else(|| FssError::UnknownColumn(class_name.to_string()))?;
        if !schema.columns()[class].kind.is_discrete() {
            return Err(FssError::ContinuousClass(class_name.to_string()));
        }
        if data.len() < FOLDS {
            return Err(FssError::TooFewInstances(data.len()));
        }
        Ok(FssProblem {
            schema,
            data,
            class,
        })
    }

    pub fn schema(&self) -> &DataSchema {
        &self.schema
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn feature_name(&self, column: usize) -> &str {
        &self.schema.columns()[column].name
    }
}

impl GreedyProblem for FssProblem {
    type Item = usize;
    type State = FssState;
    type Error = FssError;

    fn empty_state(&self) -> FssState {
        FssState {
            selected: Vec::new(),
            score: f64::NEG_INFINITY,
        }
    }

    fn candidates(&self, state: &FssState) -> Vec<usize> {
        (0..self.schema.len())
            .filter(|&c| c != self.class && !state.selected.contains(&c))
            .collect()
    }

    fn evaluate(&self, state: &FssState, item: &usize) -> Result<f64, FssError> {
        let mut features = state.selected.clone();
        features.push(*item);
        fss_score(&self.schema, &self.data, self.class, &features)
    }

    fn update_best(&self, state: &mut FssState, accepted: &Candidate<usize>) {
        state.selected.push(accepted.item);
        state.score = accepted.score;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(rows: &[[f64; 3]]) -> (DataSchema, DataBatch) {
        let schema = DataSchema::parse_header("C:disc(2),F:disc(2),Z:cont").unwrap();
        (schema, DataBatch::new(0, 3, rows.iter().flatten().copied().collect()))
    }

    #[test]
    fn no_features_predicts_majority() {
        let rows: Vec<[f64; 3]> = (0..10).map(|i| [(i % 10 < 7) as u8 as f64, 0.0, 0.0]).collect();
        let (schema, data) = dataset(&rows);
        assert_eq!(fss_score(&schema, &data, 0, &[]).unwrap(), 0.7);
    }

    #[test]
    fn copy_of_the_class_is_perfect() {
        let rows: Vec<[f64; 3]> = (0..20)
            .map(|i| {
                let c = ((i * 7) % 3 == 0) as u8 as f64;
                [c, c, (i as f64).sin()]
            })
            .collect();
        let (schema, data) = dataset(&rows);
        assert_eq!(fss_score(&schema, &data, 0, &[1]).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (schema, data) = dataset(&[[0.0, 1.0, 0.5]; 4]);
        assert_eq!(fss_score(&schema, &data, 0, &[]), Err(FssError::TooFewInstances(4)));
        let (schema, data) = dataset(&[[0.0, 1.0, 0.5]; 5]);
        assert!(matches!(fss_score(&schema, &data, 2, &[]), Err(FssError::ContinuousClass(_))));
        assert!(fss_score(&schema, &data, 0, &[0]).is_err());
        assert!(fss_score(&schema, &data, 0, &[1, 1]).is_err());
        assert!(FssProblem::new(schema, data, "Q").is_err());
    }
}
