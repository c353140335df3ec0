use std::collections::HashSet;

use crate::model::{Variable, VariableKind};

use super::DataError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: VariableKind,
}

/// Ordered column declarations from a dataset header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSchema {
    columns: Vec<Column>,
}

impl DataSchema {
    pub fn new(columns: Vec<Column>) -> Result<Self, DataError> {
        if columns.is_empty() {
            return Err(DataError::Header("no columns".into()));
        }
        let mut names = HashSet::new();
        for c in &columns {
            if c.name.is_empty() || c.name.contains([',', ':']) || c.name.chars().any(char::is_whitespace) {
                return Err(DataError::Header(format!("invalid column name {:?}", c.name)));
            }
            if !names.insert(c.name.as_str()) {
                return Err(DataError::Header(format!("duplicate column `{}`", c.name)));
            }
            if let VariableKind::Discrete { arity } = c.kind {
                if arity < 2 {
                    return Err(DataError::Header(format!(
                        "column `{}` has arity {arity}, must be at least 2",
                        c.name
                    )));
                }
            }
        }
        Ok(DataSchema { columns })
    }

    pub fn from_variables(variables: &[Variable]) -> Result<Self, DataError> {
        Self::new(
            variables
                .iter()
                .map(|v| Column {
                    name: v.name().to_string(),
                    kind: v.kind(),
                })
                .collect(),
        )
    }

    /// Parses `name:disc(arity),name:cont,...`.
    pub fn parse_header(line: &str) -> Result<Self, DataError> {
        let line = line.trim_end_matches(['\r', '\n']);
        let columns = line
            .split(',')
            .map(|token| {
                let token = token.trim();
                let (name, kind) = token
                    .split_once(':')
                    .ok_or_else(|| DataError::Header(format!("column `{token}` has no type")))?;
                let kind = if kind == "cont" {
                    VariableKind::Continuous
                } else if let Some(arity) = kind.strip_prefix("disc(").and_then(|r| r.strip_suffix(')')) {
                    VariableKind::Discrete {
                        arity: arity.parse().map_err(|_| {
                            DataError::Header(format!("invalid arity in `{token}`"))
                        })?,
                    }
                } else {
                    return Err(DataError::Header(format!("unknown column type in `{token}`")));
                };
                Ok(Column {
                    name: name.to_string(),
                    kind,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(columns)
    }

    pub fn header(&self) -> String {
        self.columns
            .iter()
            .map(|c| match c.kind {
                VariableKind::Discrete { arity } => format!("{}:disc({arity})", c.name),
                VariableKind::Continuous => format!("{}:cont", c.name),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// One variable per column, indexed by column position.
    pub fn variables(&self) -> Vec<Variable> {
        self.columns
            .iter()
            .enumerate()
            .map(|(i, c)| Variable::new(i, c.name.clone(), c.kind))
            .collect()
    }

    /// Parses one record, appending its values to `out`.
    pub fn parse_record(&self, line: &str, line_no: u64, out: &mut Vec<f64>) -> Result<(), DataError> {
        let err = |message: String| DataError::Parse {
            line: line_no,
            message,
        };
        let start = out.len();
        let mut tokens = line.split(',');
        for column in &self.columns {
            let Some(token) = tokens.next() else {
                out.truncate(start);
                return Err(err(format!(
                    "expected {} values, found {}",
                    self.columns.len(),
                    line.split(',').count()
                )));
            };
            let token = token.trim();
            let value = match column.kind {
                VariableKind::Discrete { arity } => {
                    let state: i64 = token.parse().map_err(|_| {
                        err(format!("invalid integer `{token}` in column `{}`", column.name))
                    })?;
                    if state < 0 || state >= arity as i64 {
                        return Err(err(format!(
                            "value {state} out of range for column `{}` (arity {arity})",
                            column.name
                        )));
                    }
                    state as f64
                }
                VariableKind::Continuous => {
                    let v: f64 = token.parse().map_err(|_| {
                        err(format!("invalid number `{token}` in column `{}`", column.name))
                    })?;
                    if !v.is_finite() {
                        return Err(err(format!("non-finite value in column `{}`", column.name)));
                    }
                    v
                }
            };
            out.push(value);
        }
        if tokens.next().is_some() {
            out.truncate(start);
            return Err(err(format!(
                "expected {} values, found {}",
                self.columns.len(),
                line.split(',').count()
            )));
        }
        Ok(())
    }
}
