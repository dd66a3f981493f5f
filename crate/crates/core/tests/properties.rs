//! Property suites for the cost model, virtual costs and size normalization.

use anonhard::abp::{build_3abp_instance, virtual_costs};
use anonhard::random::random_partition;
use anonhard::{hamming, Builtin, Clustering, Instance, Row, Symbol};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn row(width: usize) -> impl Strategy<Value = Row> {
    prop::collection::vec(0u32..3, width)
        .prop_map(|v| Row::new(v.into_iter().map(Symbol::Vertex).collect()))
}

fn table(max_rows: usize) -> impl Strategy<Value = Vec<Row>> {
    (1usize..7).prop_flat_map(move |w| prop::collection::vec(row(w), 2..=max_rows))
}

/// Column-by-column cost, independent of the library's mask code.
fn naive_cost(rows: &[Row], cluster: &[usize]) -> u64 {
    let width = rows[0].len();
    let differing = (0..width)
        .filter(|&c| {
            cluster
                .iter()
                .any(|&r| rows[r].get(c) != rows[cluster[0]].get(c))
        })
        .count();
    (differing * cluster.len()) as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hamming_is_a_metric((a, b, c) in (1usize..12).prop_flat_map(|w| (row(w), row(w), row(w)))) {
        let d = |x: &Row, y: &Row| hamming(x, y).unwrap();
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &b) == 0, a == b);
    }

    #[test]
    fn lower_bound_below_cost(rows in table(9), mask in any::<u16>()) {
        let inst = Instance::new(rows.clone(), 1).unwrap();
        let cluster: Vec<usize> = (0..rows.len()).filter(|&r| mask & (1 << r) != 0).collect();
        prop_assume!(!cluster.is_empty());
        let cost = inst.cluster_cost(&cluster).unwrap();
        prop_assert!(inst.cluster_lower_bound(&cluster).unwrap() <= cost);
        prop_assert_eq!(cost, naive_cost(&rows, &cluster));
    }

    #[test]
    fn normalization_never_raises_cost(rows in table(16), k in 1usize..4, seed in any::<u64>()) {
        prop_assume!(rows.len() >= k);
        let inst = Instance::new(rows.clone(), k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_partition(rows.len(), k, rows.len(), &mut rng);
        let q = inst.normalize_cluster_sizes(&p).unwrap();
        q.validate(rows.len()).unwrap();
        prop_assert!(q.sizes().iter().all(|&s| s >= k && s < 2 * k));
        prop_assert!(inst.clustering_cost(&q).unwrap() <= inst.clustering_cost(&p).unwrap());
    }

    #[test]
    fn virtual_costs_sum_to_cluster_costs(seed in any::<u64>(), graph in 0usize..4) {
        let inst = build_3abp_instance(&Builtin::ALL[graph].graph());
        let table = inst.instance();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_partition(table.len(), 3, 6, &mut rng);
        let virt = virtual_costs(&inst, &p).unwrap();
        for cluster in p.clusters() {
            let total: Ratio<u64> = cluster.iter().map(|&r| virt[r]).sum();
            prop_assert_eq!(total, Ratio::from_integer(table.cluster_cost(cluster).unwrap()));
        }
    }
}

#[test]
fn feasibility_matches_cluster_sizes() {
    let inst = Instance::new(vec![Row::zeros(2); 6], 3).unwrap();
    assert!(inst
        .is_feasible(&Clustering::new(vec![vec![0, 1, 2], vec![3, 4, 5]]))
        .unwrap());
    assert!(!inst
        .is_feasible(&Clustering::new(vec![vec![0, 1], vec![2, 3, 4, 5]]))
        .unwrap());
}
