//! Exact and greedy solvers for small k-anonymity instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Clustering, Instance};

/// Row cap used when no explicit limit is given.
pub const DEFAULT_EXACT_LIMIT: usize = 12;
/// Hard cap: the subset cost table has `2^rows` entries.
pub const MAX_EXACT_ROWS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub clustering: Clustering,
    pub cost: u64,
    pub optimal: bool,
    pub nodes_explored: u64,
}

/// Best partition found so far in one search branch.
#[derive(Clone)]
struct Best {
    cost: u64,
    clusters: Vec<Vec<usize>>,
}

impl Best {
    fn improves(&self, cost: u64, clusters: &[Vec<usize>]) -> bool {
        cost < self.cost || (cost == self.cost && clusters < self.clusters.as_slice())
    }
}

struct Search<'a> {
    k: usize,
    costs: &'a [u64],
    nodes: u64,
    stack: Vec<Vec<usize>>,
    best: Option<Best>,
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

impl Search<'_> {
    /// Enumerates blocks containing the lowest remaining row.
    fn run(&mut self, remaining: u32, spent: u64) {
        self.nodes += 1;
        if let Some(b) = &self.best {
            if spent > b.cost {
                return;
            }
        }
        if remaining == 0 {
            let better = match &self.best {
                None => true,
                Some(b) => b.improves(spent, &self.stack),
            };
            if better {
                self.best = Some(Best {
                    cost: spent,
                    clusters: self.stack.clone(),
                });
            }
            return;
        }
        for block in first_blocks(remaining, self.k) {
            let rest = remaining & !block;
            if rest != 0 && (rest.count_ones() as usize) < self.k {
                continue;
            }
            self.stack.push(members(block));
            self.run(rest, spent + self.costs[block as usize]);
            self.stack.pop();
        }
    }
}

/// Blocks of size `k..=2k-1` inside `remaining` that contain its lowest row.
fn first_blocks(remaining: u32, k: usize) -> Vec<u32> {
    let low = remaining & remaining.wrapping_neg();
    let others = remaining & !low;
    let mut out = Vec::new();
    // Walk every submask of `others`.
    let mut sub = others;
    loop {
        let size = sub.count_ones() as usize + 1;
        if size >= k && size < 2 * k {
            out.push(sub | low);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & others;
    }
    out
}

/// Minimum-cost clustering by exhaustive search over partitions whose cluster
/// sizes lie in `[k, 2k - 1]` (some optimum always has that shape).
///
/// Cluster costs are tabulated per subset up front. The search is split
/// across threads by the block holding row 0; ties resolve to the
/// lexicographically smallest list of sorted clusters.
pub fn exact_kap(inst: &Instance, limit: usize) -> Result<SolveResult> {
    let rows = inst.len();
    let cap = limit.min(MAX_EXACT_ROWS);
    if rows > cap {
        return Err(Error::TooLarge { rows, limit: cap });
    }
    let k = inst.k();
    let costs: Vec<u64> = (0u32..1 << rows)
        .into_par_iter()
        .map(|mask| {
            let size = mask.count_ones() as usize;
            if size < k || size >= 2 * k {
                return 0;
            }
            inst.cluster_cost(&members(mask))
                .expect("rows are in range")
        })
        .collect();
    let all: u32 = ((1u64 << rows) - 1) as u32;
    let branches: Vec<(Option<Best>, u64)> = first_blocks(all, k)
        .into_par_iter()
        .map(|block| {
            let rest = all & !block;
            if rest != 0 && (rest.count_ones() as usize) < k {
                return (None, 1);
            }
            let mut search = Search {
                k,
                costs: &costs,
                nodes: 0,
                stack: vec![members(block)],
                best: None,
            };
            search.run(rest, costs[block as usize]);
            (search.best, search.nodes)
        })
        .collect();
    let nodes_explored = branches.iter().map(|(_, n)| n).sum::<u64>() + 1;
    let best = branches
        .into_iter()
        .filter_map(|(b, _)| b)
        .reduce(|a, b| {
            if a.improves(b.cost, &b.clusters) {
                b
            } else {
                a
            }
        })
        .expect("rows >= k admits at least one partition");
    Ok(SolveResult {
        clustering: Clustering::new(best.clusters),
        cost: best.cost,
        optimal: true,
        nodes_explored,
    })
}

/// Greedy clustering: seed each cluster with the lowest unassigned row, grow it
/// to `k` rows by repeatedly adding the row that raises its cost least, and
/// place the fewer than `k` leftover rows one by one where they add least.
pub fn greedy_kap(inst: &Instance) -> SolveResult {
    let k = inst.k();
    let mut unassigned: Vec<usize> = (0..inst.len()).collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let cost = |c: &[usize]| inst.cluster_cost(c).expect("rows are in range");
    while unassigned.len() >= k {
        let mut cluster = vec![unassigned.remove(0)];
        while cluster.len() < k {
            let (pos, _) = unassigned
                .iter()
                .enumerate()
                .map(|(pos, &r)| {
                    let mut grown = cluster.clone();
                    grown.push(r);
                    (pos, cost(&grown))
                })
                .min_by_key(|&(pos, c)| (c, pos))
                .expect("at least k rows remain");
            cluster.push(unassigned.remove(pos));
        }
        clusters.push(cluster);
    }
    for r in unassigned {
        let target = (0..clusters.len())
            .min_by_key(|&c| {
                let mut grown = clusters[c].clone();
                grown.push(r);
                (cost(&grown) - cost(&clusters[c]), c)
            })
            .expect("rows >= k gives one cluster");
        clusters[target].push(r);
    }
    let clustering = Clustering::new(clusters).normalized();
    let total = inst
        .clustering_cost(&clustering)
        .expect("partition is valid");
    SolveResult {
        clustering,
        cost: total,
        optimal: false,
        nodes_explored: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Row, Symbol};

    fn table(rows: &[&str], k: usize) -> Instance {
        let rows = rows
            .iter()
            .map(|r| Row::new(r.chars().map(|c| Symbol::Binary(c == '1')).collect()))
            .collect();
        Instance::new(rows, k).unwrap()
    }

    #[test]
    fn two_identical_groups() {
        let inst = table(&["010", "111", "010", "111", "010", "111"], 3);
        let res = exact_kap(&inst, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(res.cost, 0);
        assert_eq!(res.clustering.clusters(), &[vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(res.optimal);
        assert!(res.nodes_explored > 0);
    }

    #[test]
    fn hexagon_of_rows() {
        let inst = table(&["000", "001", "011", "111", "110", "100"], 3);
        let res = exact_kap(&inst, DEFAULT_EXACT_LIMIT).unwrap();
        // Each triple of consecutive rows suppresses two columns.
        assert_eq!(res.cost, 12);
        assert_eq!(inst.clustering_cost(&res.clustering).unwrap(), 12);
        assert_eq!(res.clustering.clusters(), &[vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn single_cluster_when_k_is_all_rows() {
        let inst = table(&["01", "10", "11", "00"], 4);
        let res = exact_kap(&inst, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(res.clustering.clusters(), &[vec![0, 1, 2, 3]]);
        assert_eq!(res.cost, 8);
    }

    #[test]
    fn limit_is_enforced() {
        let inst = table(&["0"; 13], 2);
        assert_eq!(
            exact_kap(&inst, DEFAULT_EXACT_LIMIT),
            Err(Error::TooLarge {
                rows: 13,
                limit: 12
            })
        );
    }

    #[test]
    fn greedy_is_feasible_and_no_better_than_exact() {
        let inst = table(&["000", "001", "011", "111", "110", "100", "101"], 3);
        let greedy = greedy_kap(&inst);
        assert!(inst.is_feasible(&greedy.clustering).unwrap());
        assert!(!greedy.optimal);
        assert!(greedy.cost >= exact_kap(&inst, 12).unwrap().cost);
        let same = table(&["1011"; 7], 2);
        assert_eq!(greedy_kap(&same).cost, 0);
    }

    #[test]
    fn first_blocks_contain_lowest_row() {
        let blocks = first_blocks(0b1011_0100, 2);
        assert!(blocks.iter().all(|b| b & 0b100 != 0));
        assert!(blocks.iter().all(|b| (2..=3).contains(&b.count_ones())));
        // 3 pairs and 3 triples with row 2.
        assert_eq!(blocks.len(), 6);
    }
}
