use std::fmt;
use std::ops::Deref;

use super::ModelError;

/// Kind of a random variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariableKind {
    Discrete { arity: usize },
    Continuous,
}

impl VariableKind {
    pub fn is_discrete(self) -> bool {
        matches!(self, VariableKind::Discrete { .. })
    }

    pub fn arity(self) -> Option<usize> {
        match self {
            VariableKind::Discrete { arity } => Some(arity),
            VariableKind::Continuous => None,
        }
    }
}

impl fmt::Display for VariableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariableKind::Discrete { arity } => write!(f, "discrete {arity}"),
            VariableKind::Continuous => f.write_str("continuous"),
        }
    }
}

/// A named random variable with a dense index inside its network.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    index: usize,
    kind: VariableKind,
}

impl Variable {
    pub fn new(index: usize, name: impl Into<String>, kind: VariableKind) -> Self {
        Variable {
            name: name.into(),
            index,
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn kind(&self) -> VariableKind {
        self.kind
    }

    pub fn is_discrete(&self) -> bool {
        self.kind.is_discrete()
    }

    /// Converts a stored value to a state id, checking integrality and range.
    pub fn state_of(&self, value: f64) -> Result<usize, ModelError> {
        let arity = match self.kind {
            VariableKind::Discrete { arity } => arity,
            VariableKind::Continuous => {
                return Err(ModelError::InvalidStructure(format!(
                    "`{}` is continuous and has no discrete states",
                    self.name
                )))
            }
        };
        if value >= 0.0 && value < arity as f64 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(ModelError::StateOutOfRange {
                variable: self.name.clone(),
                value,
                arity,
            })
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A fully observed assignment, one value per variable index. Discrete values
/// hold their integral state id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataInstance(Vec<f64>);

impl DataInstance {
    pub fn new(values: Vec<f64>) -> Self {
        DataInstance(values)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for DataInstance {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for DataInstance {
    fn from(values: Vec<f64>) -> Self {
        DataInstance(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_of_checks_range_and_integrality() {
        let v = Variable::new(0, "A", VariableKind::Discrete { arity: 3 });
        assert_eq!(v.state_of(2.0).unwrap(), 2);
        assert!(v.state_of(3.0).is_err());
        assert!(v.state_of(-1.0).is_err());
        assert!(v.state_of(0.5).is_err());
        assert!(v.state_of(f64::NAN).is_err());
    }
}
