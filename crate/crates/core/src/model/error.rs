use thiserror::Error;

use super::network::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable index {0} is out of range")]
    IndexOutOfRange(usize),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("value {value} is not a valid state of `{variable}` (arity {arity})")]
    StateOutOfRange {
        variable: String,
        value: f64,
        arity: usize,
    },

    #[error("instance has {got} values, expected {expected}")]
    InstanceWidth { expected: usize, got: usize },

    #[error("sufficient statistics skeletons differ: {0}")]
    SkeletonMismatch(String),

    #[error("sample count must be at least one")]
    EmptySample,

    #[error("non-finite moment in the statistics of `{0}`")]
    NonFiniteMoment(String),

    #[error("invalid parameters for `{variable}`: {message}")]
    InvalidParameters { variable: String, message: String },

    #[error("network failed validation: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
