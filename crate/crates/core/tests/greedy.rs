mod common;

use clgbn::greedy::{fss_score, greedy_search, select_best, Candidate, FssProblem, DEFAULT_THRESHOLD};
use clgbn::{DataBatch, DataSchema};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn problem(seed: u64, n: usize) -> (FssProblem, Vec<Vec<f64>>, DataSchema) {
    let (header, rows) = fss_dataset(seed, n);
    let schema = DataSchema::parse_header(&header).unwrap();
    let batch = DataBatch::new(0, schema.len(), rows.concat());
    (FssProblem::new(schema.clone(), batch, "C").unwrap(), rows, schema)
}

#[test]
fn predictive_feature_first_and_search_is_deterministic() {
    let (p, _, _) = problem(1, 1000);
    let one = greedy_search(&p, DEFAULT_THRESHOLD, 1).unwrap();
    assert_eq!(p.feature_name(one.trace[0].item), "F1");
    assert_eq!(one.trace[0].score, 1.0);
    let eight = greedy_search(&p, DEFAULT_THRESHOLD, 8).unwrap();
    assert_eq!(one, eight);
    assert!(one.trace.len() <= 10);
    for w in one.trace.windows(2) {
        assert!(w[1].score > w[0].score + DEFAULT_THRESHOLD);
    }
}

#[test]
fn scorer_matches_naive_oracle() {
    let (_, rows, schema) = problem(2, 200);
    let batch = DataBatch::new(0, schema.len(), rows.concat());
    let kinds: Vec<_> = schema.columns().iter().map(|c| c.kind).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let features: Vec<usize> = (1..schema.len()).filter(|_| rng.random_bool(0.4)).collect();
        let fast = fss_score(&schema, &batch, 0, &features).unwrap();
        let slow = naive_nb_accuracy(&kinds, &rows, 0, &features);
        assert!((fast - slow).abs() <= 1e-12, "{features:?}: {fast} vs {slow}");
    }
    let majority = naive_nb_accuracy(&kinds, &rows, 0, &[]);
    assert_eq!(fss_score(&schema, &batch, 0, &[]).unwrap(), majority);
}

proptest! {
    #[test]
    fn select_best_ignores_list_order(scores in prop::collection::vec(-3i32..3, 1..12), seed in any::<u64>()) {
        let candidates: Vec<Candidate<usize>> = scores
            .iter()
            .enumerate()
            .map(|(ordinal, &s)| Candidate { item: ordinal, score: s as f64, ordinal })
            .collect();
        let mut shuffled = candidates.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let a = select_best(&candidates, -1.0, 0.5).map(|c| c.ordinal);
        let b = select_best(&shuffled, -1.0, 0.5).map(|c| c.ordinal);
        prop_assert_eq!(a, b);
    }
}
