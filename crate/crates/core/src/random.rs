//! Seeded generators for randomized testing: feasible partitions, local
//! perturbations, vertex covers and small tables.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graphs::{CubicGraph, VertexCover};
use crate::model::{Clustering, Instance, Row, Symbol};

/// Shuffles `0..rows` and cuts it into blocks with sizes drawn from
/// `min..=max`. A short final block is folded into the previous one.
///
/// Panics if `rows < min` or `min > max` or `min == 0`.
pub fn random_partition<R: Rng + ?Sized>(
    rows: usize,
    min: usize,
    max: usize,
    rng: &mut R,
) -> Clustering {
    assert!(min > 0 && min <= max && rows >= min);
    let mut order: Vec<usize> = (0..rows).collect();
    order.shuffle(rng);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let size = rng.random_range(min..=max).min(rest.len());
        let (head, tail) = rest.split_at(size);
        if head.len() < min {
            clusters
                .last_mut()
                .expect("rows >= min")
                .extend_from_slice(head);
        } else {
            clusters.push(head.to_vec());
        }
        rest = tail;
    }
    Clustering::new(clusters)
}

/// Applies `moves` random moves to `p`, each either relocating a row out of a
/// cluster larger than `k` or swapping two rows between clusters. Feasibility
/// for `k` is preserved.
pub fn perturb<R: Rng + ?Sized>(p: &Clustering, k: usize, moves: usize, rng: &mut R) -> Clustering {
    let mut clusters = p.clusters().to_vec();
    if clusters.len() < 2 {
        return p.clone();
    }
    for _ in 0..moves {
        let a = rng.random_range(0..clusters.len());
        let mut b = rng.random_range(0..clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        let ia = rng.random_range(0..clusters[a].len());
        if clusters[a].len() > k && rng.random_bool(0.5) {
            let r = clusters[a].swap_remove(ia);
            clusters[b].push(r);
        } else {
            let ib = rng.random_range(0..clusters[b].len());
            let (ra, rb) = (clusters[a][ia], clusters[b][ib]);
            clusters[a][ia] = rb;
            clusters[b][ib] = ra;
        }
    }
    Clustering::new(clusters)
}

/// A random, usually non-minimum vertex cover: starts from all vertices and
/// drops vertices in random order while the rest still covers every edge.
pub fn random_cover<R: Rng + ?Sized>(g: &CubicGraph, rng: &mut R) -> VertexCover {
    let mut keep = vec![true; g.n()];
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(rng);
    let stop = rng.random_range(0..=g.n());
    for &v in order.iter().take(stop) {
        if g.neighbors(v).iter().all(|&u| keep[u]) {
            keep[v] = false;
        }
    }
    VertexCover::new((0..g.n()).filter(|&v| keep[v]))
}

/// A table of `rows` rows over the symbols `0..alphabet`, encoded as vertex
/// symbols for alphabets above 2.
pub fn random_instance<R: Rng + ?Sized>(
    rows: usize,
    width: usize,
    alphabet: u32,
    k: usize,
    rng: &mut R,
) -> Instance {
    let symbol = |v: u32| {
        if alphabet <= 2 {
            Symbol::Binary(v == 1)
        } else {
            Symbol::Vertex(v)
        }
    };
    let table = (0..rows)
        .map(|_| {
            Row::new(
                (0..width)
                    .map(|_| symbol(rng.random_range(0..alphabet)))
                    .collect(),
            )
        })
        .collect();
    Instance::new(table, k).expect("caller passes rows >= k > 0 and width > 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partitions_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rows in 4..60 {
            let p = random_partition(rows, 4, 7, &mut rng);
            p.validate(rows).unwrap();
            assert!(p.sizes().iter().all(|&s| s >= 4), "{:?}", p.sizes());
        }
    }

    #[test]
    fn perturbation_keeps_feasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_partition(40, 3, 5, &mut rng);
        for _ in 0..100 {
            let q = perturb(&p, 3, 10, &mut rng);
            q.validate(40).unwrap();
            assert!(q.sizes().iter().all(|&s| s >= 3));
        }
    }

    #[test]
    fn random_covers_cover() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Builtin::Petersen.graph();
        for _ in 0..100 {
            assert!(random_cover(&g, &mut rng).is_cover(&g));
        }
    }
}
