use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;

use super::{ModelError, Variable, VariableKind};

/// One vertex of the DAG: a variable together with its ordered parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentSet {
    main_var: usize,
    parents: Vec<usize>,
}

impl ParentSet {
    pub fn main_var(&self) -> usize {
        self.main_var
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn contains(&self, var: usize) -> bool {
        self.parents.contains(&var)
    }
}

/// A DAG stored as a list of self-contained parent sets, one per variable and
/// ordered by variable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentSetDag {
    variables: Vec<Variable>,
    parent_sets: Vec<ParentSet>,
}

impl ParentSetDag {
    /// Builds a DAG from variables (indexed by position) and one parent list per
    /// variable. Rejects duplicate names, self loops, repeated parents and cycles.
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let dag = Self::new_unchecked(variables, parents)?;
        if dag.topological_order().is_none() {
            return Err(ModelError::InvalidStructure("graph contains a cycle".into()));
        }
        Ok(dag)
    }

    /// Like [`ParentSetDag::new`] but does not check acyclicity. Used by readers
    /// that report cycles through [`crate::model::BayesianNetwork::validate`].
    pub fn new_unchecked(
        variables: Vec<Variable>,
        parents: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        if variables.len() != parents.len() {
            return Err(ModelError::InvalidStructure(format!(
                "{} variables but {} parent lists",
                variables.len(),
                parents.len()
            )));
        }
        let mut names = HashSet::new();
        for (i, v) in variables.iter().enumerate() {
            if v.index() != i {
                return Err(ModelError::InvalidStructure(format!(
                    "variable `{}` has index {} at position {i}",
                    v.name(),
                    v.index()
                )));
            }
            if v.name().is_empty() || v.name().chars().any(char::is_whitespace) {
                return Err(ModelError::InvalidStructure(format!(
                    "invalid variable name {:?}",
                    v.name()
                )));
            }
            if !names.insert(v.name()) {
                return Err(ModelError::InvalidStructure(format!(
                    "duplicate variable name `{}`",
                    v.name()
                )));
            }
            if let VariableKind::Discrete { arity } = v.kind() {
                if arity < 2 {
                    return Err(ModelError::InvalidStructure(format!(
                        "`{}` has arity {arity}, must be at least 2",
                        v.name()
                    )));
                }
            }
        }
        let n = variables.len();
        let mut parent_sets = Vec::with_capacity(n);
        for (main_var, list) in parents.into_iter().enumerate() {
            let mut seen = HashSet::new();
            for &p in &list {
                if p >= n {
                    return Err(ModelError::IndexOutOfRange(p));
                }
                if p == main_var {
                    return Err(ModelError::InvalidStructure(format!(
                        "`{}` is its own parent",
                        variables[p].name()
                    )));
                }
                if !seen.insert(p) {
                    return Err(ModelError::InvalidStructure(format!(
                        "`{}` listed twice as a parent of `{}`",
                        variables[p].name(),
                        variables[main_var].name()
                    )));
                }
            }
            parent_sets.push(ParentSet {
                main_var,
                parents: list,
            });
        }
        Ok(ParentSetDag {
            variables,
            parent_sets,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> Result<&Variable, ModelError> {
        self.variables
            .get(index)
            .ok_or(ModelError::IndexOutOfRange(index))
    }

    pub fn variable_by_name(&self, name: &str) -> Result<&Variable, ModelError> {
        self.variables
            .iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn parent_sets(&self) -> &[ParentSet] {
        &self.parent_sets
    }

    pub fn parents_of(&self, index: usize) -> &[usize] {
        &self.parent_sets[index].parents
    }

    /// Total number of directed links, i.e. the sum of all parent-set sizes.
    pub fn number_of_links(&self) -> usize {
        self.parent_sets
            .par_iter()
            .map(|ps| ps.parents.len())
            .sum()
    }

    /// Main variables of every parent set that lists `var` as a parent, in
    /// index order.
    pub fn children_of(&self, var: &Variable) -> Result<Vec<&Variable>, ModelError> {
        match self.variables.get(var.index()) {
            Some(v) if v == var => {}
            _ => return Err(ModelError::UnknownVariable(var.name().to_string())),
        }
        let index = var.index();
        Ok(self
            .parent_sets
            .par_iter()
            .filter(|ps| ps.contains(index))
            .map(|ps| &self.variables[ps.main_var])
            .collect())
    }

    /// Topological order with the smallest available index first, or `None`
    /// when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut missing: Vec<usize> = self.parent_sets.iter().map(|ps| ps.parents.len()).collect();
        let mut children = vec![Vec::new(); n];
        for ps in &self.parent_sets {
            for &p in &ps.parents {
                children[p].push(ps.main_var);
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n)
            .filter(|&i| missing[i] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &c in &children[i] {
                missing[c] -= 1;
                if missing[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Incremental construction of a [`ParentSetDag`].
#[derive(Debug, Default, Clone)]
pub struct DagBuilder {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, kind: VariableKind) -> usize {
        let index = self.variables.len();
        self.variables.push(Variable::new(index, name, kind));
        self.parents.push(Vec::new());
        index
    }

    pub fn discrete(&mut self, name: impl Into<String>, arity: usize) -> usize {
        self.add_variable(name, VariableKind::Discrete { arity })
    }

    pub fn continuous(&mut self, name: impl Into<String>) -> usize {
        self.add_variable(name, VariableKind::Continuous)
    }

    pub fn add_parent(&mut self, child: usize, parent: usize) -> &mut Self {
        self.parents[child].push(parent);
        self
    }

    pub fn set_parents(&mut self, child: usize, parents: &[usize]) -> &mut Self {
        self.parents[child] = parents.to_vec();
        self
    }

    pub fn build(self) -> Result<ParentSetDag, ModelError> {
        ParentSetDag::new(self.variables, self.parents)
    }

    pub fn build_unchecked(self) -> Result<ParentSetDag, ModelError> {
        ParentSetDag::new_unchecked(self.variables, self.parents)
    }
}
