//! Line-oriented text format for networks.
//!
//! ```text
//! variable <name> discrete <arity>
//! variable <name> continuous
//! parents <name> : <p1> <p2> ...
//! cpt <name> <config> <p0> <p1> ...
//! clg <name> <config> <alpha> <beta...> <sigma2>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Numbers are written
//! with the shortest representation that parses back to the same `f64`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{BayesianNetwork, ConditionalDistribution, ModelError, ParentSetDag, Variable, VariableKind};

/// Serializes a network; reading the text back yields an identical network.
pub fn write_model(bn: &BayesianNetwork) -> String {
    let mut out = String::new();
    for v in bn.variables() {
        let _ = writeln!(out, "variable {} {}", v.name(), v.kind());
    }
    for ps in bn.dag().parent_sets() {
        let _ = write!(out, "parents {} :", bn.variables()[ps.main_var()].name());
        for &p in ps.parents() {
            let _ = write!(out, " {}", bn.variables()[p].name());
        }
        out.push('\n');
    }
    for d in bn.distributions() {
        let name = d.main_var().name();
        match d {
            ConditionalDistribution::Multinomial(t) => {
                for j in 0..t.configs() {
                    let _ = write!(out, "cpt {name} {j}");
                    for p in t.row(j) {
                        let _ = write!(out, " {p}");
                    }
                    out.push('\n');
                }
            }
            ConditionalDistribution::Clg(c) => {
                for j in 0..c.configs() {
                    let _ = write!(out, "clg {name} {j} {}", c.intercept(j));
                    for b in c.coefficients(j) {
                        let _ = write!(out, " {b}");
                    }
                    let _ = writeln!(out, " {}", c.variance(j));
                }
            }
        }
    }
    out
}

/// Reads a complete network and rejects it if validation fails.
pub fn read_model(text: &str) -> Result<BayesianNetwork, ModelError> {
    let parsed = parse(text)?;
    let dag = ParentSetDag::new_unchecked(parsed.variables, parsed.parents)?;
    let mut distributions = Vec::with_capacity(dag.len());
    for i in 0..dag.len() {
        distributions.push(ConditionalDistribution::default_for(&dag, i)?);
    }
    let mut seen: Vec<Vec<bool>> = distributions
        .iter()
        .map(|d| vec![false; d.layout().configs()])
        .collect();
    for p in &parsed.parameters {
        let err = |message: String| ModelError::Parse {
            line: p.line,
            message,
        };
        let d = &mut distributions[p.var];
        let configs = d.layout().configs();
        if p.config >= configs {
            return Err(err(format!(
                "configuration {} out of range for `{}` ({configs} configurations)",
                p.config,
                d.main_var()
            )));
        }
        if std::mem::replace(&mut seen[p.var][p.config], true) {
            return Err(err(format!("configuration {} given twice", p.config)));
        }
        match (d, p.is_cpt) {
            (ConditionalDistribution::Multinomial(t), true) => t
                .set_row(p.config, &p.values)
                .map_err(|e| err(e.to_string()))?,
            (ConditionalDistribution::Clg(c), false) => {
                let k = c.continuous_parents().len();
                if p.values.len() != k + 2 {
                    return Err(err(format!(
                        "expected intercept, {k} coefficients and a variance"
                    )));
                }
                c.set_config(p.config, p.values[0], &p.values[1..=k], p.values[k + 1])
                    .map_err(|e| err(e.to_string()))?;
            }
            (d, _) => {
                return Err(err(format!(
                    "parameter kind does not match `{}`",
                    d.main_var()
                )))
            }
        }
    }
    for (i, s) in seen.iter().enumerate() {
        if let Some(j) = s.iter().position(|&done| !done) {
            return Err(ModelError::Parse {
                line: 0,
                message: format!(
                    "missing parameters for configuration {j} of `{}`",
                    dag.variables()[i]
                ),
            });
        }
    }
    BayesianNetwork::new(dag, distributions)
}

/// Reads only the variables and parent sets, ignoring parameter lines.
pub fn read_structure(text: &str) -> Result<ParentSetDag, ModelError> {
    let parsed = parse(text)?;
    ParentSetDag::new(parsed.variables, parsed.parents)
}

struct ParameterLine {
    line: usize,
    var: usize,
    config: usize,
    is_cpt: bool,
    values: Vec<f64>,
}

struct Parsed {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    parameters: Vec<ParameterLine>,
}

fn parse(text: &str) -> Result<Parsed, ModelError> {
    let mut variables: Vec<Variable> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut parents: Vec<Option<Vec<usize>>> = Vec::new();
    let mut parameters = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ModelError::Parse { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let lookup = |name: &str| {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| err(format!("unknown variable `{name}`")))
        };
        match tokens[0] {
            "variable" => {
                let kind = match tokens[2..] {
                    ["continuous"] => VariableKind::Continuous,
                    ["discrete", arity] => VariableKind::Discrete {
                        arity: arity
                            .parse()
                            .map_err(|_| err(format!("invalid arity `{arity}`")))?,
                    },
                    _ => return Err(err("expected `variable <name> discrete <arity>` or `variable <name> continuous`".into())),
                };
                let name = tokens.get(1).copied().unwrap_or_default();
                if by_name.contains_key(name) {
                    return Err(err(format!("duplicate variable `{name}`")));
                }
                if let VariableKind::Discrete { arity } = kind {
                    if arity < 2 {
                        return Err(err(format!("`{name}` has arity {arity}, must be at least 2")));
                    }
                }
                by_name.insert(name.to_string(), variables.len());
                variables.push(Variable::new(variables.len(), name, kind));
                parents.push(None);
            }
            "parents" => {
                if tokens.len() < 3 || tokens[2] != ":" {
                    return Err(err("expected `parents <name> : <p1> ...`".into()));
                }
                let child = lookup(tokens[1])?;
                let list = tokens[3..]
                    .iter()
                    .map(|p| lookup(p))
                    .collect::<Result<Vec<_>, _>>()?;
                if parents[child].replace(list).is_some() {
                    return Err(err(format!("parents of `{}` given twice", tokens[1])));
                }
            }
            directive @ ("cpt" | "clg") => {
                if tokens.len() < 4 {
                    return Err(err(format!("`{directive}` line is too short")));
                }
                let var = lookup(tokens[1])?;
                let config = tokens[2]
                    .parse()
                    .map_err(|_| err(format!("invalid configuration `{}`", tokens[2])))?;
                let values = tokens[3..]
                    .iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| err(format!("invalid number `{t}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                parameters.push(ParameterLine {
                    line,
                    var,
                    config,
                    is_cpt: directive == "cpt",
                    values,
                });
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(Parsed {
        variables,
        parents: parents.into_iter().map(Option::unwrap_or_default).collect(),
        parameters,
    })
}
