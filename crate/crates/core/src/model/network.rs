use std::fmt;

use super::distribution::VARIANCE_FLOOR;
use super::{
    CompoundVector, ConditionalDistribution, IndexedElement, ModelError, ParentSetDag, Variable,
};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Acyclicity,
    ClgRestriction,
    RowSum,
    NegativeProbability,
    VarianceFloor,
    NonFiniteParameter,
    Mismatch,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::Acyclicity => "acyclicity",
            ViolationKind::ClgRestriction => "clg-restriction",
            ViolationKind::RowSum => "row-sum",
            ViolationKind::NegativeProbability => "negative-probability",
            ViolationKind::VarianceFloor => "variance-floor",
            ViolationKind::NonFiniteParameter => "non-finite-parameter",
            ViolationKind::Mismatch => "structure-mismatch",
        }
    }
}

/// A single rule broken by a network.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub variable: Option<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.variable {
            Some(v) => write!(f, "{} ({v}): {}", self.kind.code(), self.detail),
            None => write!(f, "{}: {}", self.kind.code(), self.detail),
        }
    }
}

/// Structure plus one conditional distribution per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    dag: ParentSetDag,
    distributions: Vec<ConditionalDistribution>,
}

impl BayesianNetwork {
    /// Builds a network and rejects it if [`BayesianNetwork::validate`] finds
    /// any violation.
    pub fn new(
        dag: ParentSetDag,
        distributions: Vec<ConditionalDistribution>,
    ) -> Result<Self, ModelError> {
        let bn = Self::new_unchecked(dag, distributions);
        bn.validate().map_err(ModelError::Invalid)?;
        Ok(bn)
    }

    pub fn new_unchecked(dag: ParentSetDag, distributions: Vec<ConditionalDistribution>) -> Self {
        BayesianNetwork { dag, distributions }
    }

    /// Uniform tables and standard-normal CLGs on top of `dag`.
    pub fn with_default_parameters(dag: ParentSetDag) -> Result<Self, ModelError> {
        let distributions = (0..dag.len())
            .map(|i| ConditionalDistribution::default_for(&dag, i))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dag, distributions)
    }

    pub fn dag(&self) -> &ParentSetDag {
        &self.dag
    }

    pub fn variables(&self) -> &[Variable] {
        self.dag.variables()
    }

    pub fn distributions(&self) -> &[ConditionalDistribution] {
        &self.distributions
    }

    pub fn distribution(&self, index: usize) -> &ConditionalDistribution {
        &self.distributions[index]
    }

    pub fn distributions_mut(&mut self) -> &mut [ConditionalDistribution] {
        &mut self.distributions
    }

    /// Checks acyclicity, the CLG restriction, table rows and variances, and
    /// that every distribution agrees with its parent set.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let vars = self.dag.variables();
        let mut push = |kind, variable: Option<&Variable>, detail: String| {
            out.push(Violation {
                kind,
                variable: variable.map(|v| v.name().to_string()),
                detail,
            })
        };

        if self.dag.topological_order().is_none() {
            push(ViolationKind::Acyclicity, None, "graph contains a cycle".into());
        }
        if self.distributions.len() != vars.len() {
            push(
                ViolationKind::Mismatch,
                None,
                format!(
                    "{} distributions for {} variables",
                    self.distributions.len(),
                    vars.len()
                ),
            );
        }

        for (ps, var) in self.dag.parent_sets().iter().zip(vars) {
            if var.is_discrete() {
                for &p in ps.parents() {
                    if !vars[p].is_discrete() {
                        push(
                            ViolationKind::ClgRestriction,
                            Some(var),
                            format!("discrete variable has continuous parent `{}`", vars[p]),
                        );
                    }
                }
            }
        }

        for (i, d) in self.distributions.iter().enumerate() {
            let Some(var) = vars.get(i) else { break };
            let parents = self.dag.parents_of(i);
            let discrete: Vec<usize> = parents.iter().copied().filter(|&p| vars[p].is_discrete()).collect();
            let continuous: Vec<usize> = parents.iter().copied().filter(|&p| !vars[p].is_discrete()).collect();
            let same = |listed: &[Variable], expected: &[usize]| {
                listed.len() == expected.len()
                    && listed.iter().zip(expected).all(|(v, &e)| *v == vars[e])
            };
            let kind_ok = d.main_var() == var
                && match d {
                    ConditionalDistribution::Multinomial(_) => var.is_discrete(),
                    ConditionalDistribution::Clg(_) => !var.is_discrete(),
                };
            let parents_ok = same(d.discrete_parents(), &discrete)
                && (var.is_discrete() || same(d.continuous_parents(), &continuous));
            if !kind_ok || !parents_ok {
                push(
                    ViolationKind::Mismatch,
                    Some(var),
                    "distribution does not match the parent set".into(),
                );
                continue;
            }

            match d {
                ConditionalDistribution::Multinomial(t) => {
                    for j in 0..t.configs() {
                        let row = t.row(j);
                        if row.iter().any(|p| !p.is_finite()) {
                            push(ViolationKind::NonFiniteParameter, Some(var), format!("row {j}"));
                            continue;
                        }
                        if row.iter().any(|&p| p < 0.0) {
                            push(
                                ViolationKind::NegativeProbability,
                                Some(var),
                                format!("row {j} has a negative entry"),
                            );
                        }
                        let sum: f64 = row.iter().sum();
                        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                            push(ViolationKind::RowSum, Some(var), format!("row {j} sums to {sum}"));
                        }
                    }
                }
                ConditionalDistribution::Clg(c) => {
                    for j in 0..c.configs() {
                        let finite = c.intercept(j).is_finite()
                            && c.coefficients(j).iter().all(|b| b.is_finite())
                            && c.variance(j).is_finite();
                        if !finite {
                            push(ViolationKind::NonFiniteParameter, Some(var), format!("configuration {j}"));
                        } else if c.variance(j) < VARIANCE_FLOOR {
                            push(
                                ViolationKind::VarianceFloor,
                                Some(var),
                                format!("variance {} below {VARIANCE_FLOOR}", c.variance(j)),
                            );
                        }
                    }
                }
            }
        }

        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// `Σ_i log p(x_i | pa(x_i))` for a fully observed instance.
    pub fn log_density(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.check_width(x)?;
        let mut total = 0.0;
        for d in &self.distributions {
            total += d.log_conditional(x)?;
        }
        Ok(total)
    }

    /// One indexed element of local statistics per distribution.
    pub fn global_sufficient_statistics(&self, x: &[f64]) -> Result<CompoundVector, ModelError> {
        self.check_width(x)?;
        let elements = self
            .distributions
            .iter()
            .map(|d| {
                Ok(IndexedElement {
                    index: d.main_var().index(),
                    local: d.local_sufficient_statistics(x)?,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        CompoundVector::new(elements)
    }

    fn check_width(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.dag.len() {
            return Err(ModelError::InstanceWidth {
                expected: self.dag.len(),
                got: x.len(),
            });
        }
        Ok(())
    }
}
