mod common;

use clgbn::model::exact::ExactSum;
use clgbn::model::{
    moments_to_parameters, BayesianNetwork, CompoundAccumulator, CompoundVector, DagBuilder,
    IndexedElement,
};
use num::{BigInt, BigRational, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// Nearest f64 to an exact rational, ties to even, by bisection over the
/// ordered bit patterns of finite doubles.
fn round_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r < &BigRational::zero();
    let target = if negative { -r.clone() } else { r.clone() };
    let (mut lo, mut hi) = (0u64, f64::MAX.to_bits());
    // Largest double <= target.
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if rational(f64::from_bits(mid)) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let below = f64::from_bits(lo);
    let above = f64::from_bits(lo + 1);
    let d_below = &target - rational(below);
    let d_above = rational(above) - &target;
    let pick = if d_below < d_above || (d_below == d_above && lo % 2 == 0) { below } else { above };
    if negative { -pick } else { pick }
}

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        (-1e300..1e300f64),
        (-1e-300..1e-300f64),
        any::<f64>().prop_filter("finite", |x| x.is_finite() && x.abs() < 1e307),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_sum_is_correctly_rounded(xs in prop::collection::vec(finite_f64(), 0..40)) {
        let exact: BigRational = xs.iter().fold(BigRational::zero(), |acc, &x| acc + rational(x));
        let sum: ExactSum = xs.iter().copied().collect();
        prop_assert_eq!(sum.value().to_bits(), round_rational(&exact).to_bits());
    }

    #[test]
    fn exact_sum_ignores_grouping(xs in prop::collection::vec(finite_f64(), 1..60), cut in 0usize..60) {
        let cut = cut % xs.len();
        let whole: ExactSum = xs.iter().copied().collect();
        let mut right: ExactSum = xs[cut..].iter().copied().collect();
        let left: ExactSum = xs[..cut].iter().copied().collect();
        right.merge(&left);
        prop_assert_eq!(whole.value().to_bits(), right.value().to_bits());
    }

    #[test]
    fn links_and_children_match_brute_force(seed in any::<u64>(), n in 1usize..=50, p in 0.0..0.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (adj, dag) = random_dag(&mut rng, n, p);
        let edges = adj.iter().flatten().filter(|&&e| e).count();
        prop_assert_eq!(dag.number_of_links(), edges);
        let mut total = 0;
        for v in dag.variables() {
            let children: Vec<usize> = dag.children_of(v).unwrap().iter().map(|c| c.index()).collect();
            let expected: Vec<usize> = (0..n).filter(|&c| adj[v.index()][c]).collect();
            total += children.len();
            prop_assert_eq!(children, expected);
        }
        prop_assert_eq!(total, edges);
    }

    #[test]
    fn discrete_joint_sums_to_one(seed in any::<u64>(), n in 1usize..=3, p in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = DagBuilder::new();
        // Arities 2 and 3 keep the joint space at or below 12 states.
        let arities = [[2, 2, 3], [2, 3, 2], [3, 2, 2]][seed as usize % 3];
        for i in 0..n {
            b.discrete(format!("D{i}"), arities[i]);
        }
        for child in 0..n {
            let parents: Vec<usize> = (0..child).filter(|_| rand::Rng::random_bool(&mut rng, p)).collect();
            b.set_parents(child, &parents);
        }
        let bn = random_discrete_network(b.build().unwrap(), seed);
        let mut total = 0.0;
        for (x, p) in enumerate_joint(&bn) {
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let via_model = bn.log_density(&xf).unwrap().exp();
            prop_assert!((via_model - p).abs() <= 1e-12);
            total += via_model;
        }
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn vector_add_commutes_and_associates(
        a in prop::collection::vec(-1e3..1e3f64, 5),
        b in prop::collection::vec(-1e3..1e3f64, 5),
        c in prop::collection::vec(-1e3..1e3f64, 5),
    ) {
        let v = |x: &[f64]| CompoundVector::new(vec![
            IndexedElement { index: 0, local: x[..2].to_vec() },
            IndexedElement { index: 3, local: x[2..].to_vec() },
        ]).unwrap();
        let (a, b, c) = (v(&a), v(&b), v(&c));
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        let left = a.add(&b).unwrap().add(&c).unwrap();
        let right = a.add(&b.add(&c).unwrap()).unwrap();
        for (x, y) in left.values().zip(right.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300) || x == y);
        }
        let zero = CompoundVector::new(vec![
            IndexedElement { index: 0, local: vec![0.0; 2] },
            IndexedElement { index: 3, local: vec![0.0; 3] },
        ]).unwrap();
        prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
    }
}

fn chain3() -> BayesianNetwork {
    let mut b = DagBuilder::new();
    let a = b.discrete("A", 2);
    let z = b.continuous("Z");
    let x = b.continuous("X");
    b.add_parent(z, a).set_parents(x, &[a, z]);
    BayesianNetwork::with_default_parameters(b.build().unwrap()).unwrap()
}

#[test]
fn global_statistics_concatenate_local_ones() {
    let bn = chain3();
    let x = [1.0, 0.5, -2.0];
    let s = bn.global_sufficient_statistics(&x).unwrap();
    assert_eq!(s.skeleton().iter().map(|e| e.0).collect::<Vec<_>>(), vec![0, 1, 2]);
    for (e, d) in s.elements().iter().zip(bn.distributions()) {
        assert_eq!(e.local, d.local_sufficient_statistics(&x).unwrap());
    }
    // A=1, no continuous parents for Z: second block of [1, z, z²].
    assert_eq!(s.elements()[1].local, vec![0.0, 0.0, 0.0, 1.0, 0.5, 0.25]);
    // X given z: second block of [1, z, x, xz, x², z²].
    assert_eq!(s.elements()[2].local[6..], [1.0, 0.5, -2.0, -1.0, 4.0, 0.25]);
}

#[test]
fn standard_normal_at_zero() {
    let mut b = DagBuilder::new();
    b.continuous("X");
    let bn = BayesianNetwork::with_default_parameters(b.build().unwrap()).unwrap();
    let expected = -0.5 * (2.0 * std::f64::consts::PI).ln();
    assert!((bn.log_density(&[0.0]).unwrap() - expected).abs() < 1e-15);
}

#[test]
fn five_node_structure_queries() {
    let dag = five_node_dag();
    assert_eq!(dag.number_of_links(), 5);
    let x3 = dag.variable_by_name("X3").unwrap();
    let names: Vec<&str> = dag.children_of(x3).unwrap().iter().map(|v| v.name()).collect();
    assert_eq!(names, ["X4", "X5"]);
    let x5 = dag.variable_by_name("X5").unwrap();
    assert!(dag.children_of(x5).unwrap().is_empty());
    let stranger = clgbn::Variable::new(7, "Q", clgbn::VariableKind::Continuous);
    assert!(dag.children_of(&stranger).is_err());
}

#[test]
fn duplicated_data_gives_identical_parameters() {
    let bn = chain3();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<[f64; 3]> = (0..500)
        .map(|_| {
            let a = rand::Rng::random_range(&mut rng, 0..2) as f64;
            let z: f64 = rand::Rng::random_range(&mut rng, -2.0..2.0);
            [a, z, 0.3 * z - a + rand::Rng::random_range(&mut rng, -0.1..0.1)]
        })
        .collect();
    let fit = |copies: usize| {
        let mut acc = CompoundAccumulator::new(&bn);
        for _ in 0..copies {
            for r in &rows {
                acc.add_instance(&bn, r).unwrap();
            }
        }
        let n = acc.count();
        moments_to_parameters(bn.dag(), &acc.to_vector().divide_by(n as f64), n).unwrap()
    };
    assert_eq!(clgbn::model::write_model(&fit(1)), clgbn::model::write_model(&fit(2)));
}

#[test]
fn three_node_clg_round_trip() {
    let truth = clgbn::model::read_model(
        "variable A discrete 2\nvariable Z continuous\nvariable X continuous\n\
         parents Z : A\nparents X : A Z\n\
         cpt A 0 0.35 0.65\nclg Z 0 -1 0.5\nclg Z 1 2 1.5\n\
         clg X 0 0.5 -0.7 0.8\nclg X 1 -0.25 1.2 0.3\n",
    )
    .unwrap();
    let mut data = Vec::new();
    clgbn::synthetic::generate_data(&truth, 100_000, 17, 2, &mut data).unwrap();
    let mut source = clgbn::BatchSource::from_reader(&data[..], 1000).unwrap();
    let learned = clgbn::compute_mle(&mut source, truth.dag(), &clgbn::MleConfig::new(1000, 2)).unwrap();
    for (t, l) in truth.distributions().iter().zip(learned.distributions()) {
        match (t, l) {
            (clgbn::ConditionalDistribution::Multinomial(t), clgbn::ConditionalDistribution::Multinomial(l)) => {
                for (a, b) in t.probabilities().iter().zip(l.probabilities()) {
                    assert!((a - b).abs() <= 0.01, "{a} vs {b}");
                }
            }
            (clgbn::ConditionalDistribution::Clg(t), clgbn::ConditionalDistribution::Clg(l)) => {
                for j in 0..t.configs() {
                    assert!((t.intercept(j) - l.intercept(j)).abs() <= 0.05);
                    for (a, b) in t.coefficients(j).iter().zip(l.coefficients(j)) {
                        assert!((a - b).abs() <= 0.05, "{a} vs {b}");
                    }
                    assert!((t.variance(j) - l.variance(j)).abs() <= 0.05);
                }
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn rational_rounding_oracle_sanity() {
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    assert_eq!(round_rational(&third), 1.0 / 3.0);
    assert_eq!(round_rational(&rational(0.1)).to_f64().unwrap(), 0.1);
    assert_eq!(round_rational(&-rational(5e-324)), -5e-324);
}
