//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::io::Write;
use std::path::{Path, PathBuf};

use clgbn::model::{
    BayesianNetwork, ConditionalDistribution, DagBuilder, MultinomialTable, ParentSetDag,
    Variable, VariableKind,
};
use clgbn::DataBatch;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `X1→X2, X1→X3, X2→X4, X3→X4, X3→X5`, all binary.
pub fn five_node_dag() -> ParentSetDag {
    let mut b = DagBuilder::new();
    let x: Vec<usize> = (1..=5).map(|i| b.discrete(format!("X{i}"), 2)).collect();
    b.set_parents(x[1], &[x[0]])
        .set_parents(x[2], &[x[0]])
        .set_parents(x[3], &[x[1], x[2]])
        .set_parents(x[4], &[x[2]]);
    b.build().unwrap()
}

/// Discrete network on `dag` with every row drawn uniformly from the simplex
/// interior, bounded away from zero.
pub fn random_discrete_network(dag: ParentSetDag, seed: u64) -> BayesianNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dists = (0..dag.len())
        .map(|i| {
            let v = dag.variables()[i].clone();
            let parents: Vec<Variable> = dag.parents_of(i).iter().map(|&p| dag.variables()[p].clone()).collect();
            let arity = v.kind().arity().unwrap();
            let configs: usize = parents.iter().map(|p| p.kind().arity().unwrap()).product();
            let mut probs = Vec::new();
            for _ in 0..configs {
                let raw: Vec<f64> = (0..arity).map(|_| rng.random_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                probs.extend(raw.iter().map(|r| r / total));
            }
            ConditionalDistribution::Multinomial(MultinomialTable::new(v, parents, probs).unwrap())
        })
        .collect();
    BayesianNetwork::new(dag, dists).unwrap()
}

/// `p(x)` for a discrete network, by direct table lookups.
pub fn joint_probability(bn: &BayesianNetwork, x: &[usize]) -> f64 {
    let mut p = 1.0;
    for (i, d) in bn.distributions().iter().enumerate() {
        let ConditionalDistribution::Multinomial(t) = d else {
            panic!("joint_probability needs a discrete network")
        };
        let mut j = 0;
        for &q in bn.dag().parents_of(i) {
            j = j * bn.variables()[q].kind().arity().unwrap() + x[q];
        }
        p *= t.row(j)[x[i]];
    }
    p
}

/// Every joint state of a discrete network, with its probability.
pub fn enumerate_joint(bn: &BayesianNetwork) -> Vec<(Vec<usize>, f64)> {
    let arities: Vec<usize> = bn.variables().iter().map(|v| v.kind().arity().unwrap()).collect();
    let total: usize = arities.iter().product();
    (0..total)
        .map(|mut code| {
            let mut x = vec![0; arities.len()];
            for (slot, &a) in x.iter_mut().zip(&arities).rev() {
                *slot = code % a;
                code /= a;
            }
            let p = joint_probability(bn, &x);
            (x, p)
        })
        .collect()
}

/// `P(target = state | evidence)` by enumeration.
pub fn exact_conditional(bn: &BayesianNetwork, evidence: &[(usize, usize)], target: usize, state: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, p) in enumerate_joint(bn) {
        if evidence.iter().all(|&(i, v)| x[i] == v) {
            den += p;
            if x[target] == state {
                num += p;
            }
        }
    }
    num / den
}

/// Random DAG over `n` variables as an adjacency matrix `adj[parent][child]`
/// following a random topological order, plus the built structure.
pub fn random_dag(rng: &mut impl Rng, n: usize, edge_probability: f64) -> (Vec<Vec<bool>>, ParentSetDag) {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut adj = vec![vec![false; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(edge_probability) {
                adj[order[a]][order[b]] = true;
            }
        }
    }
    let mut builder = DagBuilder::new();
    for i in 0..n {
        if rng.random_bool(0.5) {
            builder.discrete(format!("V{i}"), 2 + i % 3);
        } else {
            builder.continuous(format!("V{i}"));
        }
    }
    for child in 0..n {
        let parents: Vec<usize> = (0..n).filter(|&p| adj[p][child]).collect();
        builder.set_parents(child, &parents);
    }
    (adj, builder.build().unwrap())
}

/// Peak number of batches being processed at once in a pipeline where idle
/// workers queue for one shared loading channel. Loading a batch takes
/// `load`, processing it takes `process`. A batch that finishes at the same
/// instant another starts counts as overlapping.
pub fn simulate_pipeline(process: u64, load: u64, workers: usize, batches: usize) -> usize {
    #[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
    enum Event {
        // Ordered so that at equal times loads finish before processing does.
        Loaded,
        Processed,
    }
    let mut queue: VecDeque<usize> = (0..workers).collect();
    let mut events: BinaryHeap<Reverse<(u64, Event, usize)>> = BinaryHeap::new();
    let mut channel_busy = false;
    let mut issued = 0;
    let (mut busy, mut peak) = (0usize, 0usize);
    let mut now = 0u64;

    let start_load = |now: u64, queue: &mut VecDeque<usize>, events: &mut BinaryHeap<_>, busy_flag: &mut bool, issued: &mut usize| {
        if !*busy_flag && *issued < batches {
            if let Some(w) = queue.pop_front() {
                *busy_flag = true;
                *issued += 1;
                events.push(Reverse((now + load, Event::Loaded, w)));
            }
        }
    };
    start_load(now, &mut queue, &mut events, &mut channel_busy, &mut issued);
    while let Some(Reverse((t, event, w))) = events.pop() {
        now = t;
        match event {
            Event::Loaded => {
                channel_busy = false;
                busy += 1;
                peak = peak.max(busy);
                events.push(Reverse((now + process, Event::Processed, w)));
            }
            Event::Processed => {
                busy -= 1;
                queue.push_back(w);
            }
        }
        start_load(now, &mut queue, &mut events, &mut channel_busy, &mut issued);
    }
    peak
}

/// Naive Bayes 5-fold accuracy written out with explicit loops: Laplace
/// counts for the class and discrete features, per-class Gaussian features
/// with two-pass moments and a variance floor of 1e-6.
pub fn naive_nb_accuracy(kinds: &[VariableKind], rows: &[Vec<f64>], class: usize, features: &[usize]) -> f64 {
    let k = kinds[class].arity().unwrap();
    let n = rows.len();
    let mut correct = 0;
    for fold in 0..5 {
        let train: Vec<&Vec<f64>> = rows.iter().enumerate().filter(|(i, _)| i % 5 != fold).map(|(_, r)| r).collect();
        let mut class_count = vec![0.0; k];
        for r in &train {
            class_count[r[class] as usize] += 1.0;
        }
        let log_prior: Vec<f64> = (0..k)
            .map(|c| (class_count[c] + 1.0) / (train.len() as f64 + k as f64))
            .map(f64::ln)
            .collect();
        // Per feature: closure giving log p(value | class).
        let mut tables: Vec<Vec<Vec<f64>>> = Vec::new();
        for &f in features {
            let mut per_class = Vec::new();
            match kinds[f] {
                VariableKind::Discrete { arity } => {
                    for c in 0..k {
                        let mut counts = vec![0.0; arity];
                        for r in &train {
                            if r[class] as usize == c {
                                counts[r[f] as usize] += 1.0;
                            }
                        }
                        let mut row = Vec::new();
                        for v in 0..arity {
                            row.push((counts[v] + 1.0) / (class_count[c] + arity as f64));
                        }
                        per_class.push(row);
                    }
                }
                VariableKind::Continuous => {
                    for c in 0..k {
                        let mut sum = 0.0;
                        for r in &train {
                            if r[class] as usize == c {
                                sum += r[f];
                            }
                        }
                        if class_count[c] == 0.0 {
                            per_class.push(vec![0.0, 1.0]);
                            continue;
                        }
                        let mean = sum / class_count[c];
                        let mut ss = 0.0;
                        for r in &train {
                            if r[class] as usize == c {
                                ss += (r[f] - mean) * (r[f] - mean);
                            }
                        }
                        per_class.push(vec![mean, (ss / class_count[c]).max(1e-6)]);
                    }
                }
            }
            tables.push(per_class);
        }
        for (i, r) in rows.iter().enumerate() {
            if i % 5 != fold {
                continue;
            }
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for c in 0..k {
                let mut score = log_prior[c];
                for (t, &f) in features.iter().enumerate() {
                    let entry = &tables[t][c];
                    score += match kinds[f] {
                        VariableKind::Discrete { .. } => entry[r[f] as usize].ln(),
                        VariableKind::Continuous => {
                            let (mean, var) = (entry[0], entry[1]);
                            -0.5 * ((2.0 * std::f64::consts::PI).ln() + var.ln()) - (r[f] - mean) * (r[f] - mean) / (2.0 * var)
                        }
                    };
                }
                if score > best_score {
                    best_score = score;
                    best = c;
                }
            }
            if best == r[class] as usize {
                correct += 1;
            }
        }
    }
    correct as f64 / n as f64
}

/// Writes a dataset file with the given header and rows.
pub fn write_dataset(dir: &Path, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> PathBuf {
    let path = dir.join(name);
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path).unwrap());
    writeln!(f, "{header}").unwrap();
    for r in rows {
        writeln!(f, "{r}").unwrap();
    }
    f.flush().unwrap();
    path
}

/// Record values read line by line without the batch machinery.
pub fn sequential_read(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|t| t.trim().parse().unwrap()).collect())
        .collect()
}

pub fn batch_rows(batch: &DataBatch) -> Vec<Vec<f64>> {
    batch.iter().map(<[f64]>::to_vec).collect()
}

/// Feature-selection data: `C` uniform binary, `F1 = C`, `N1..N9` noise
/// independent of `C` (alternating binary and Gaussian).
pub fn fss_dataset(seed: u64, n: usize) -> (String, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut header = vec!["C:disc(2)".to_string(), "F1:disc(2)".to_string()];
    for i in 1..=9 {
        header.push(if i % 2 == 1 { format!("N{i}:disc(2)") } else { format!("N{i}:cont") });
    }
    let rows = (0..n)
        .map(|_| {
            let c = rng.random_range(0..2) as f64;
            let mut row = vec![c, c];
            for i in 1..=9 {
                row.push(if i % 2 == 1 {
                    rng.random_range(0..2) as f64
                } else {
                    rng.sample::<f64, _>(rand_distr::StandardNormal)
                });
            }
            row
        })
        .collect();
    (header.join(","), rows)
}

pub fn row_text(row: &[f64]) -> String {
    row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
