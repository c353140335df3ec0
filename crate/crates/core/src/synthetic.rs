//! Super-parent benchmark network and ancestral data generation.
//!
//! Four root variables feed every child: two discrete (`C`, `SPM`) and two
//! Gaussian (`SPG1`, `SPG2`). Multinomial children `M1..Mm` take only the
//! discrete roots as parents, since discrete nodes may not have continuous
//! parents; Gaussian children `G1..Gg` take all four.

use std::fmt::Write as _;
use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::data::DataSchema;
use crate::model::{
    BayesianNetwork, ClgDistribution, ConditionalDistribution, DagBuilder, ModelError,
    MultinomialTable,
};
use crate::sampling::{task_rng, Evidence, LikelihoodWeighting};

/// Samples generated per parallel task.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub m_children: usize,
    pub g_children: usize,
    pub class_arity: usize,
    pub spm_arity: usize,
    pub m_arity: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            m_children: 10,
            g_children: 10,
            class_arity: 2,
            spm_arity: 3,
            m_arity: 2,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn new(m_children: usize, g_children: usize, seed: u64) -> Self {
        SyntheticSpec {
            m_children,
            g_children,
            seed,
            ..Self::default()
        }
    }
}

/// Builds the network with parameters drawn from `spec.seed`: table rows
/// from a flat Dirichlet, intercepts and coefficients from U(-1, 1),
/// variances from U(0.5, 1.5).
pub fn build_super_parent_network(spec: &SyntheticSpec) -> Result<BayesianNetwork, ModelError> {
    let mut b = DagBuilder::new();
    let c = b.discrete("C", spec.class_arity);
    let spm = b.discrete("SPM", spec.spm_arity);
    let spg1 = b.continuous("SPG1");
    let spg2 = b.continuous("SPG2");
    for i in 1..=spec.m_children {
        let m = b.discrete(format!("M{i}"), spec.m_arity);
        b.set_parents(m, &[c, spm]);
    }
    for i in 1..=spec.g_children {
        let g = b.continuous(format!("G{i}"));
        b.set_parents(g, &[c, spm, spg1, spg2]);
    }
    let dag = b.build()?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut distributions = Vec::with_capacity(dag.len());
    for i in 0..dag.len() {
        let mut d = ConditionalDistribution::default_for(&dag, i)?;
        match &mut d {
            ConditionalDistribution::Multinomial(t) => fill_table(t, &mut rng)?,
            ConditionalDistribution::Clg(g) => fill_clg(g, &mut rng)?,
        }
        distributions.push(d);
    }
    BayesianNetwork::new(dag, distributions)
}

fn fill_table(t: &mut MultinomialTable, rng: &mut ChaCha8Rng) -> Result<(), ModelError> {
    for j in 0..t.configs() {
        let draws: Vec<f64> = (0..t.arity()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        let row: Vec<f64> = draws.iter().map(|d| d / total).collect();
        t.set_row(j, &row)?;
    }
    Ok(())
}

fn fill_clg(g: &mut ClgDistribution, rng: &mut ChaCha8Rng) -> Result<(), ModelError> {
    let k = g.continuous_parents().len();
    for j in 0..g.configs() {
        let alpha = rng.random_range(-1.0..1.0);
        let beta: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let variance = rng.random_range(0.5..1.5);
        g.set_config(j, alpha, &beta, variance)?;
    }
    Ok(())
}

/// Writes a header and `n` ancestral samples of `bn` to `out`.
///
/// Sample `i` uses its own generator derived from `(seed, i)`, so the bytes
/// depend only on the network, `n` and `seed`.
pub fn generate_data<W: Write>(
    bn: &BayesianNetwork,
    n: u64,
    seed: u64,
    workers: usize,
    out: &mut W,
) -> io::Result<u64> {
    let schema = DataSchema::from_variables(bn.variables()).map_err(io::Error::other)?;
    writeln!(out, "{}", schema.header())?;
    let sampler = LikelihoodWeighting::new(bn, &Evidence::none()).map_err(io::Error::other)?;
    let discrete: Vec<bool> = bn.variables().iter().map(|v| v.is_discrete()).collect();
    let chunks = n.div_ceil(CHUNK);
    // Render a bounded window of chunks at a time to cap memory.
    let window = (workers.max(1) * 4) as u64;
    let mut next = 0;
    while next < chunks {
        let end = (next + window).min(chunks);
        let rendered: Vec<Result<String, ModelError>> = crate::pool::with_workers(workers, || {
            (next..end)
                .into_par_iter()
                .map(|c| render(&sampler, &discrete, seed, c * CHUNK, ((c + 1) * CHUNK).min(n)))
                .collect()
        });
        for text in rendered {
            out.write_all(text.map_err(io::Error::other)?.as_bytes())?;
        }
        next = end;
    }
    out.flush()?;
    Ok(n)
}

fn render(
    sampler: &LikelihoodWeighting<'_>,
    discrete: &[bool],
    seed: u64,
    lo: u64,
    hi: u64,
) -> Result<String, ModelError> {
    let mut text = String::with_capacity((hi - lo) as usize * discrete.len() * 12);
    let mut x = vec![0.0; discrete.len()];
    for i in lo..hi {
        sampler.draw_into(&mut x, &mut task_rng(seed, i))?;
        for (col, (&v, &d)) in x.iter().zip(discrete).enumerate() {
            if col > 0 {
                text.push(',');
            }
            if d {
                let _ = write!(text, "{}", v as u64);
            } else {
                let _ = write!(text, "{v}");
            }
        }
        text.push('\n');
    }
    Ok(text)
}
