use std::fmt;

use crate::model::{BayesianNetwork, Variable};

use super::{Evidence, SamplingError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparison {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Eq => "=",
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
        }
    }
}

/// `variable <op> threshold` over a single variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predicate {
    pub variable: usize,
    pub comparison: Comparison,
    pub threshold: f64,
}

impl Predicate {
    pub fn holds(&self, value: f64) -> bool {
        match self.comparison {
            Comparison::Eq => value == self.threshold,
            Comparison::Lt => value < self.threshold,
            Comparison::Le => value <= self.threshold,
            Comparison::Gt => value > self.threshold,
            Comparison::Ge => value >= self.threshold,
        }
    }
}

/// `P(name<op>value)` or `E(name)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Probability { text: String, predicate: Predicate },
    Expectation { text: String, variable: usize },
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Probability { text, .. } | Query::Expectation { text, .. } => f.write_str(text),
        }
    }
}

impl Query {
    pub fn parse(bn: &BayesianNetwork, text: &str) -> Result<Query, SamplingError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || SamplingError::Query(format!("cannot parse `{text}`; expected `P(name=value)` or `E(name)`"));
        let (head, body) = compact.split_at_checked(1).ok_or_else(bad)?;
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(bad)?;
        match head {
            "E" => {
                let variable = lookup(bn, body)?;
                if variable.is_discrete() {
                    return Err(SamplingError::Query(format!(
                        "E({body}) needs a continuous variable"
                    )));
                }
                Ok(Query::Expectation {
                    text: compact.clone(),
                    variable: variable.index(),
                })
            }
            "P" => {
                let (pos, comparison, len) = [
                    ("<=", Comparison::Le),
                    (">=", Comparison::Ge),
                    ("=", Comparison::Eq),
                    ("<", Comparison::Lt),
                    (">", Comparison::Gt),
                ]
                .iter()
                .find_map(|(sym, c)| body.find(sym).map(|p| (p, *c, sym.len())))
                .ok_or_else(bad)?;
                let variable = lookup(bn, &body[..pos])?;
                let raw = &body[pos + len..];
                let threshold: f64 = raw
                    .parse()
                    .ok()
                    .filter(|t: &f64| t.is_finite())
                    .ok_or_else(|| SamplingError::Query(format!("invalid value `{raw}` in `{text}`")))?;
                if comparison == Comparison::Eq && !variable.is_discrete() {
                    return Err(SamplingError::Query(format!(
                        "`{}` is continuous; use <, <=, > or >=",
                        variable.name()
                    )));
                }
                let text = format!("P({}{}{raw})", variable.name(), comparison.symbol());
                Ok(Query::Probability {
                    text,
                    predicate: Predicate {
                        variable: variable.index(),
                        comparison,
                        threshold,
                    },
                })
            }
            _ => Err(bad()),
        }
    }
}

fn lookup<'a>(bn: &'a BayesianNetwork, name: &str) -> Result<&'a Variable, SamplingError> {
    Ok(bn.dag().variable_by_name(name)?)
}

/// Parses `name=value,name=value,...`; an empty string is no evidence.
pub fn parse_evidence(bn: &BayesianNetwork, text: &str) -> Result<Evidence, SamplingError> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| SamplingError::Evidence(format!("expected `name=value`, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| SamplingError::Evidence(format!("invalid value in `{item}`")))?;
        pairs.push((lookup(bn, name.trim())?.index(), value));
    }
    Evidence::new(bn, pairs)
}
