mod common;

use bnchaos::builtins;
use bnchaos::markov::{
    deviation_curve, is_doubly_stochastic, mixing_time, stationary_distribution,
    stationary_residual, transition_matrix, MixingOptions, Norm,
};
use bnchaos::{is_chaotic, IterationGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn l2_deviation_is_monotone_for_doubly_stochastic_chains() {
    for (name, f) in builtins::catalog_functions() {
        let m = transition_matrix(&IterationGraph::build(&f));
        for j in [0, 5, 15] {
            let curve = deviation_curve(&m, j, 300, Norm::L2).unwrap();
            for w in curve.windows(2) {
                assert!(w[1] <= w[0] + 1e-15, "{name} start {j}");
            }
        }
    }
}

#[test]
fn mixing_time_is_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = MixingOptions::default();
    for k in [1, 5, 12] {
        let f = builtins::catalog_function(k).unwrap();
        let b = mixing_time(&transition_matrix(&IterationGraph::build(&f)), &opts).unwrap();
        for _ in 0..3 {
            let perm = common::random_permutation(&mut rng, 4);
            let g = f.permute_components(&perm).unwrap();
            let gm = transition_matrix(&IterationGraph::build(&g));
            assert_eq!(mixing_time(&gm, &opts).unwrap(), b, "F{k} {perm:?}");
            assert!(is_doubly_stochastic(gm.graph()));
        }
    }
}

#[test]
fn stationary_distribution_of_random_regular_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 200 {
        let n = 2 + checked % 4;
        let f = common::random_map(&mut rng, n);
        if !is_chaotic(&f) {
            continue;
        }
        let m = transition_matrix(&IterationGraph::build(&f));
        if let Ok(pi) = stationary_distribution(&m) {
            assert!(stationary_residual(&m, pi.as_slice()) < 1e-12);
            assert!(pi.as_slice().iter().all(|&p| p > 0.0));
            let uniform = pi
                .as_slice()
                .iter()
                .all(|&p| (p - pi.as_slice()[0]).abs() < 1e-12);
            assert_eq!(uniform, is_doubly_stochastic(m.graph()), "{f}");
        }
        checked += 1;
    }
}
