//! The exact solver against full enumeration of every set partition.

use anonhard::random::random_instance;
use anonhard::{exact_kap, greedy_kap, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum cost over all set partitions with every block of size at least k.
fn brute_force(inst: &Instance) -> u64 {
    fn go(inst: &Instance, next: usize, blocks: &mut Vec<Vec<usize>>, best: &mut u64) {
        if next == inst.len() {
            if blocks.iter().all(|b| b.len() >= inst.k()) {
                let cost = blocks.iter().map(|b| inst.cluster_cost(b).unwrap()).sum();
                *best = (*best).min(cost);
            }
            return;
        }
        for i in 0..blocks.len() {
            blocks[i].push(next);
            go(inst, next + 1, blocks, best);
            blocks[i].pop();
        }
        blocks.push(vec![next]);
        go(inst, next + 1, blocks, best);
        blocks.pop();
    }
    let mut best = u64::MAX;
    go(inst, 0, &mut Vec::new(), &mut best);
    best
}

#[test]
fn exact_matches_full_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..300 {
        let k = 2 + trial % 2;
        let rows = rng.random_range(k..=8);
        let width = rng.random_range(1..=6);
        let alphabet = rng.random_range(2..=3);
        let inst = random_instance(rows, width, alphabet, k, &mut rng);
        let exact = exact_kap(&inst, 12).unwrap();
        assert_eq!(exact.cost, brute_force(&inst), "trial {trial}");
        assert_eq!(inst.clustering_cost(&exact.clustering).unwrap(), exact.cost);
        assert_eq!(
            inst.normalize_cluster_sizes(&exact.clustering).unwrap(),
            exact.clustering
        );
        let greedy = greedy_kap(&inst);
        assert!(inst.is_feasible(&greedy.clustering).unwrap());
        assert!(greedy.cost >= exact.cost);
    }
}

#[test]
fn exact_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let inst = random_instance(10, 4, 2, 3, &mut rng);
        let a = exact_kap(&inst, 12).unwrap();
        let b = exact_kap(&inst, 12).unwrap();
        assert_eq!(a, b);
    }
}
