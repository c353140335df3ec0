use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ModelError, ParentSetDag, Variable, VariableKind};

/// Lower bound on every CLG variance.
pub const VARIANCE_FLOOR: f64 = 1e-6;

/// Shape of a local sufficient-statistics vector. Depends on structure only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalLayout {
    /// One-hot over (parent configuration, state) pairs.
    Multinomial { configs: usize, arity: usize },
    /// One moment block per discrete parent configuration.
    Clg { configs: usize, continuous_parents: usize },
}

impl LocalLayout {
    pub fn configs(&self) -> usize {
        match *self {
            LocalLayout::Multinomial { configs, .. } | LocalLayout::Clg { configs, .. } => configs,
        }
    }

    /// Length of the block belonging to one parent configuration.
    pub fn block_len(&self) -> usize {
        match *self {
            LocalLayout::Multinomial { arity, .. } => arity,
            LocalLayout::Clg {
                continuous_parents: k,
                ..
            } => clg_block_len(k),
        }
    }

    pub fn len(&self) -> usize {
        self.configs() * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `[1, z, x, x·z, x², z_a·z_b (a ≤ b)]`
pub(crate) fn clg_block_len(k: usize) -> usize {
    2 * k + 3 + k * (k + 1) / 2
}

pub(crate) fn configurations(parents: &[Variable]) -> usize {
    parents
        .iter()
        .map(|p| p.kind().arity().unwrap_or(1))
        .product()
}

/// Mixed-radix index of the observed parent states, first-listed parent most
/// significant.
pub(crate) fn configuration_index(parents: &[Variable], x: &[f64]) -> Result<usize, ModelError> {
    let mut j = 0;
    for p in parents {
        let arity = p.kind().arity().unwrap_or(1);
        j = j * arity + p.state_of(value_at(x, p.index())?)?;
    }
    Ok(j)
}

fn value_at(x: &[f64], index: usize) -> Result<f64, ModelError> {
    x.get(index).copied().ok_or(ModelError::InstanceWidth {
        expected: index + 1,
        got: x.len(),
    })
}

fn gaussian_log_density(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * ((2.0 * PI).ln() + variance.ln()) - d * d / (2.0 * variance)
}

/// Conditional probability table of a discrete variable given discrete parents.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialTable {
    main: Variable,
    parents: Vec<Variable>,
    arity: usize,
    /// Row-major: `probabilities[j * arity + state]`.
    probabilities: Vec<f64>,
}

impl MultinomialTable {
    pub fn new(
        main: Variable,
        parents: Vec<Variable>,
        probabilities: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let arity = main.kind().arity().ok_or_else(|| {
            ModelError::InvalidStructure(format!("`{main}` is continuous, not multinomial"))
        })?;
        let expected = configurations(&parents) * arity;
        if probabilities.len() != expected {
            return Err(ModelError::InvalidParameters {
                variable: main.name().to_string(),
                message: format!("expected {expected} probabilities, got {}", probabilities.len()),
            });
        }
        Ok(MultinomialTable {
            main,
            parents,
            arity,
            probabilities,
        })
    }

    pub fn uniform(main: Variable, parents: Vec<Variable>) -> Result<Self, ModelError> {
        let arity = main.kind().arity().unwrap_or(1);
        let len = configurations(&parents) * arity;
        Self::new(main, parents, vec![1.0 / arity as f64; len])
    }

    pub fn main_var(&self) -> &Variable {
        &self.main
    }

    pub fn parents(&self) -> &[Variable] {
        &self.parents
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn configs(&self) -> usize {
        self.probabilities.len() / self.arity
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.probabilities[config * self.arity..(config + 1) * self.arity]
    }

    pub fn set_row(&mut self, config: usize, row: &[f64]) -> Result<(), ModelError> {
        if config >= self.configs() || row.len() != self.arity {
            return Err(ModelError::InvalidParameters {
                variable: self.main.name().to_string(),
                message: format!("row {config} of length {} does not fit the table", row.len()),
            });
        }
        let a = self.arity;
        self.probabilities[config * a..(config + 1) * a].copy_from_slice(row);
        Ok(())
    }

    pub fn probability(&self, config: usize, state: usize) -> f64 {
        self.probabilities[config * self.arity + state]
    }
}

/// Gaussian variable whose mean is linear in its continuous parents, with one
/// set of coefficients per configuration of its discrete parents.
#[derive(Debug, Clone, PartialEq)]
pub struct ClgDistribution {
    main: Variable,
    discrete_parents: Vec<Variable>,
    continuous_parents: Vec<Variable>,
    intercepts: Vec<f64>,
    /// Config-major: `coefficients[j * k + c]`.
    coefficients: Vec<f64>,
    variances: Vec<f64>,
}

impl ClgDistribution {
    pub fn new(
        main: Variable,
        discrete_parents: Vec<Variable>,
        continuous_parents: Vec<Variable>,
        intercepts: Vec<f64>,
        coefficients: Vec<f64>,
        variances: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let bad = |message: String| ModelError::InvalidParameters {
            variable: main.name().to_string(),
            message,
        };
        if main.is_discrete() {
            return Err(ModelError::InvalidStructure(format!(
                "`{main}` is discrete, not CLG"
            )));
        }
        let configs = configurations(&discrete_parents);
        let k = continuous_parents.len();
        if intercepts.len() != configs || variances.len() != configs {
            return Err(bad(format!("expected {configs} intercepts and variances")));
        }
        if coefficients.len() != configs * k {
            return Err(bad(format!("expected {} coefficients", configs * k)));
        }
        Ok(ClgDistribution {
            main,
            discrete_parents,
            continuous_parents,
            intercepts,
            coefficients,
            variances,
        })
    }

    /// α = 0, β = 0, σ² = 1 for every configuration.
    pub fn standard(
        main: Variable,
        discrete_parents: Vec<Variable>,
        continuous_parents: Vec<Variable>,
    ) -> Result<Self, ModelError> {
        let configs = configurations(&discrete_parents);
        let k = continuous_parents.len();
        Self::new(
            main,
            discrete_parents,
            continuous_parents,
            vec![0.0; configs],
            vec![0.0; configs * k],
            vec![1.0; configs],
        )
    }

    pub fn main_var(&self) -> &Variable {
        &self.main
    }

    pub fn discrete_parents(&self) -> &[Variable] {
        &self.discrete_parents
    }

    pub fn continuous_parents(&self) -> &[Variable] {
        &self.continuous_parents
    }

    pub fn configs(&self) -> usize {
        self.intercepts.len()
    }

    pub fn intercept(&self, config: usize) -> f64 {
        self.intercepts[config]
    }

    pub fn coefficients(&self, config: usize) -> &[f64] {
        let k = self.continuous_parents.len();
        &self.coefficients[config * k..(config + 1) * k]
    }

    pub fn variance(&self, config: usize) -> f64 {
        self.variances[config]
    }

    pub fn set_config(
        &mut self,
        config: usize,
        intercept: f64,
        coefficients: &[f64],
        variance: f64,
    ) -> Result<(), ModelError> {
        let k = self.continuous_parents.len();
        if config >= self.configs() || coefficients.len() != k {
            return Err(ModelError::InvalidParameters {
                variable: self.main.name().to_string(),
                message: format!("configuration {config} with {} coefficients does not fit", coefficients.len()),
            });
        }
        self.intercepts[config] = intercept;
        self.coefficients[config * k..(config + 1) * k].copy_from_slice(coefficients);
        self.variances[config] = variance;
        Ok(())
    }

    fn mean(&self, config: usize, x: &[f64]) -> Result<f64, ModelError> {
        let mut mean = self.intercepts[config];
        for (b, z) in self.coefficients(config).iter().zip(&self.continuous_parents) {
            mean += b * value_at(x, z.index())?;
        }
        Ok(mean)
    }
}

/// Local distribution of one variable given its parents.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalDistribution {
    Multinomial(MultinomialTable),
    Clg(ClgDistribution),
}

impl ConditionalDistribution {
    /// Uniform rows for discrete variables, standard normal CLG for continuous
    /// ones. A discrete variable only conditions on its discrete parents here;
    /// continuous parents of a discrete node are reported by validation.
    pub fn default_for(dag: &ParentSetDag, index: usize) -> Result<Self, ModelError> {
        let main = dag.variable(index)?.clone();
        let parents: Vec<Variable> = dag
            .parents_of(index)
            .iter()
            .map(|&p| dag.variables()[p].clone())
            .collect();
        let (discrete, continuous): (Vec<_>, Vec<_>) =
            parents.into_iter().partition(|p| p.is_discrete());
        Ok(match main.kind() {
            VariableKind::Discrete { .. } => {
                ConditionalDistribution::Multinomial(MultinomialTable::uniform(main, discrete)?)
            }
            VariableKind::Continuous => {
                ConditionalDistribution::Clg(ClgDistribution::standard(main, discrete, continuous)?)
            }
        })
    }

    pub fn main_var(&self) -> &Variable {
        match self {
            ConditionalDistribution::Multinomial(t) => &t.main,
            ConditionalDistribution::Clg(c) => &c.main,
        }
    }

    pub fn discrete_parents(&self) -> &[Variable] {
        match self {
            ConditionalDistribution::Multinomial(t) => &t.parents,
            ConditionalDistribution::Clg(c) => &c.discrete_parents,
        }
    }

    pub fn continuous_parents(&self) -> &[Variable] {
        match self {
            ConditionalDistribution::Multinomial(_) => &[],
            ConditionalDistribution::Clg(c) => &c.continuous_parents,
        }
    }

    pub fn layout(&self) -> LocalLayout {
        match self {
            ConditionalDistribution::Multinomial(t) => LocalLayout::Multinomial {
                configs: t.configs(),
                arity: t.arity,
            },
            ConditionalDistribution::Clg(c) => LocalLayout::Clg {
                configs: c.configs(),
                continuous_parents: c.continuous_parents.len(),
            },
        }
    }

    /// Index of the parent configuration observed in `x`.
    pub fn configuration(&self, x: &[f64]) -> Result<usize, ModelError> {
        configuration_index(self.discrete_parents(), x)
    }

    /// Writes the non-zero block of the local sufficient statistics of `x` into
    /// `block` and returns its offset inside the full local vector. Every other
    /// entry of the local vector is zero.
    pub fn statistics_block(&self, x: &[f64], block: &mut Vec<f64>) -> Result<usize, ModelError> {
        block.clear();
        let j = self.configuration(x)?;
        let value = value_at(x, self.main_var().index())?;
        match self {
            ConditionalDistribution::Multinomial(t) => {
                let state = t.main.state_of(value)?;
                block.push(1.0);
                Ok(j * t.arity + state)
            }
            ConditionalDistribution::Clg(c) => {
                let k = c.continuous_parents.len();
                block.reserve(clg_block_len(k));
                block.push(1.0);
                for z in &c.continuous_parents {
                    block.push(value_at(x, z.index())?);
                }
                block.push(value);
                for i in 0..k {
                    let z = block[1 + i];
                    block.push(value * z);
                }
                block.push(value * value);
                for a in 0..k {
                    for b in a..k {
                        let prod = block[1 + a] * block[1 + b];
                        block.push(prod);
                    }
                }
                Ok(j * clg_block_len(k))
            }
        }
    }

    /// Local sufficient statistics of one instance as a dense vector.
    pub fn local_sufficient_statistics(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        let mut block = Vec::new();
        let offset = self.statistics_block(x, &mut block)?;
        let mut local = vec![0.0; self.layout().len()];
        local[offset..offset + block.len()].copy_from_slice(&block);
        Ok(local)
    }

    /// `log p(x_i | pa(x_i))`; zero-probability states give negative infinity.
    pub fn log_conditional(&self, x: &[f64]) -> Result<f64, ModelError> {
        let j = self.configuration(x)?;
        let value = value_at(x, self.main_var().index())?;
        match self {
            ConditionalDistribution::Multinomial(t) => {
                Ok(t.probability(j, t.main.state_of(value)?).ln())
            }
            ConditionalDistribution::Clg(c) => Ok(gaussian_log_density(
                value,
                c.mean(j, x)?,
                c.variances[j],
            )),
        }
    }

    /// `p(x_i | pa(x_i))`, a density for continuous variables.
    pub fn conditional(&self, x: &[f64]) -> Result<f64, ModelError> {
        let j = self.configuration(x)?;
        let value = value_at(x, self.main_var().index())?;
        match self {
            ConditionalDistribution::Multinomial(t) => Ok(t.probability(j, t.main.state_of(value)?)),
            ConditionalDistribution::Clg(c) => {
                Ok(gaussian_log_density(value, c.mean(j, x)?, c.variances[j]).exp())
            }
        }
    }

    /// Draws a value given the parent values already present in `x`.
    pub fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<f64, ModelError> {
        let j = self.configuration(x)?;
        match self {
            ConditionalDistribution::Multinomial(t) => {
                let row = t.row(j);
                let u: f64 = rng.random();
                let mut cumulative = 0.0;
                let mut last = 0;
                for (state, &p) in row.iter().enumerate() {
                    if p > 0.0 {
                        last = state;
                    }
                    cumulative += p;
                    if u < cumulative {
                        return Ok(state as f64);
                    }
                }
                Ok(last as f64)
            }
            ConditionalDistribution::Clg(c) => {
                let noise: f64 = StandardNormal.sample(rng);
                Ok(c.mean(j, x)? + c.variances[j].sqrt() * noise)
            }
        }
    }
}
