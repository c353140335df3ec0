//! Likelihood-weighting importance sampling.
//!
//! Sample `i` is drawn from its own generator seeded by
//! [`derive_task_seed`]`(seed, i)`, and the weighted sums are reduced over a
//! fixed binary bracketing of the index range. Estimates are therefore
//! bit-identical for every worker count.

mod query;
mod seed;

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::model::{BayesianNetwork, DataInstance, ModelError};

pub use query::{parse_evidence, Comparison, Predicate, Query};
pub use seed::{derive_task_seed, task_rng};

/// Index range handled sequentially at the bottom of the reduction tree.
const LEAF: u64 = 1024;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("invalid evidence: {0}")]
    Evidence(String),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("sample count must be at least one")]
    NoSamples,

    #[error("all samples rejected by evidence")]
    AllRejected,
}

/// Observed values, keyed by variable index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Evidence {
    values: BTreeMap<usize, f64>,
}

impl Evidence {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(
        bn: &BayesianNetwork,
        pairs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self, SamplingError> {
        let mut values = BTreeMap::new();
        for (index, value) in pairs {
            let var = bn.dag().variable(index)?;
            if var.is_discrete() {
                var.state_of(value)?;
            } else if !value.is_finite() {
                return Err(SamplingError::Evidence(format!("non-finite value for `{var}`")));
            }
            if values.insert(index, value).is_some() {
                return Err(SamplingError::Evidence(format!("`{var}` observed twice")));
            }
        }
        Ok(Evidence { values })
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(&index).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&i, &v)| (i, v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub assignment: DataInstance,
    pub weight: f64,
}

/// Ancestral sampler with evidence variables clamped.
#[derive(Debug, Clone)]
pub struct LikelihoodWeighting<'a> {
    bn: &'a BayesianNetwork,
    /// Topological order; `Some(value)` marks an observed variable.
    plan: Vec<(usize, Option<f64>)>,
}

impl<'a> LikelihoodWeighting<'a> {
    pub fn new(bn: &'a BayesianNetwork, evidence: &Evidence) -> Result<Self, SamplingError> {
        let order = bn.dag().topological_order().ok_or_else(|| {
            ModelError::InvalidStructure("graph contains a cycle".into())
        })?;
        for (i, _) in evidence.iter() {
            bn.dag().variable(i)?;
        }
        Ok(LikelihoodWeighting {
            bn,
            plan: order.into_iter().map(|i| (i, evidence.get(i))).collect(),
        })
    }

    /// Draws into `x` and returns the weight, the product of the evidence
    /// conditionals. Continuous evidence contributes density values.
    pub fn draw_into<R: Rng + ?Sized>(&self, x: &mut [f64], rng: &mut R) -> Result<f64, ModelError> {
        let mut weight = 1.0;
        for &(i, observed) in &self.plan {
            let d = self.bn.distribution(i);
            match observed {
                Some(value) => {
                    x[i] = value;
                    weight *= d.conditional(x)?;
                }
                None => x[i] = d.sample(x, rng)?,
            }
        }
        Ok(weight)
    }

    pub fn weighted_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WeightedSample, ModelError> {
        let mut x = vec![0.0; self.bn.dag().len()];
        let weight = self.draw_into(&mut x, rng)?;
        Ok(WeightedSample {
            assignment: DataInstance::new(x),
            weight,
        })
    }
}

/// Self-normalized estimate `Σ f(x_i) w_i / Σ w_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Delta-method standard error of the ratio estimator.
    pub std_error: f64,
    pub weight_sum: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    w: f64,
    wf: f64,
    ww: f64,
    wwf: f64,
    wwff: f64,
}

impl Moments {
    fn push(&mut self, f: f64, w: f64) {
        let wf = w * f;
        self.w += w;
        self.wf += wf;
        self.ww += w * w;
        self.wwf += w * wf;
        self.wwff += wf * wf;
    }

    fn combine(a: Moments, b: Moments) -> Moments {
        Moments {
            w: a.w + b.w,
            wf: a.wf + b.wf,
            ww: a.ww + b.ww,
            wwf: a.wwf + b.wwf,
            wwff: a.wwff + b.wwff,
        }
    }
}

/// Sampling settings shared by every query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Estimates `E[f(X_target) | evidence]`.
pub fn expected_value<F>(
    bn: &BayesianNetwork,
    evidence: &Evidence,
    target: usize,
    f: F,
    config: &SamplingConfig,
) -> Result<Estimate, SamplingError>
where
    F: Fn(f64) -> f64 + Sync,
{
    if config.samples == 0 {
        return Err(SamplingError::NoSamples);
    }
    bn.dag().variable(target)?;
    let sampler = LikelihoodWeighting::new(bn, evidence)?;
    let m = crate::pool::with_workers(config.workers, || {
        reduce(&sampler, target, &f, config.seed, 0, config.samples)
    })?;
    if !(m.w > 0.0) {
        return Err(SamplingError::AllRejected);
    }
    let value = m.wf / m.w;
    let spread = (m.wwff - 2.0 * value * m.wwf + value * value * m.ww).max(0.0);
    Ok(Estimate {
        value,
        std_error: spread.sqrt() / m.w,
        weight_sum: m.w,
        samples: config.samples,
    })
}

/// Estimates `P(predicate | evidence)`.
pub fn event_probability(
    bn: &BayesianNetwork,
    evidence: &Evidence,
    predicate: &Predicate,
    config: &SamplingConfig,
) -> Result<Estimate, SamplingError> {
    expected_value(
        bn,
        evidence,
        predicate.variable,
        |v| if predicate.holds(v) { 1.0 } else { 0.0 },
        config,
    )
}

/// Answers a parsed query.
pub fn answer(
    bn: &BayesianNetwork,
    evidence: &Evidence,
    query: &Query,
    config: &SamplingConfig,
) -> Result<Estimate, SamplingError> {
    match query {
        Query::Probability { predicate, .. } => event_probability(bn, evidence, predicate, config),
        Query::Expectation { variable, .. } => expected_value(bn, evidence, *variable, |v| v, config),
    }
}

fn reduce<F>(
    sampler: &LikelihoodWeighting<'_>,
    target: usize,
    f: &F,
    seed: u64,
    lo: u64,
    hi: u64,
) -> Result<Moments, ModelError>
where
    F: Fn(f64) -> f64 + Sync,
{
    if hi - lo <= LEAF {
        let mut m = Moments::default();
        let mut x = vec![0.0; sampler.bn.dag().len()];
        for i in lo..hi {
            let w = sampler.draw_into(&mut x, &mut task_rng(seed, i))?;
            m.push(if w == 0.0 { 0.0 } else { f(x[target]) }, w);
        }
        return Ok(m);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(
        || reduce(sampler, target, f, seed, lo, mid),
        || reduce(sampler, target, f, seed, mid, hi),
    );
    Ok(Moments::combine(a?, b?))
}
