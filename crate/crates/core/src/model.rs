//! The suppression cost model: symbols, rows, instances and clusterings.
//!
//! A cluster of rows is anonymized by suppressing every column on which its
//! rows do not all agree; the cluster pays one unit per suppressed entry, i.e.
//! `|cluster| * suppressed_columns`. A clustering is feasible when every
//! cluster has at least `k` rows.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One table entry.
///
/// Each family has its own constructor, so symbols of different families never
/// compare equal. Indices stored inside symbols are the 1-based labels used in
/// serialized files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// `0` or `1` of the binary alphabet.
    Binary(bool),
    /// `a_i`, shared by the rows of one vertex set.
    Vertex(u32),
    /// `a_{i,h}`, private to row `h` of vertex set `i`.
    VertexRow(u32, u32),
    /// `t_{i,j}`, private to the edge row of `(v_i, v_j)`.
    Edge(u32, u32),
    /// `u_i`, private to free row `i`.
    Free(u32),
}

impl Symbol {
    pub const ZERO: Symbol = Symbol::Binary(false);
    pub const ONE: Symbol = Symbol::Binary(true);
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Symbol::Binary(false) => f.write_str("0"),
            Symbol::Binary(true) => f.write_str("1"),
            Symbol::Vertex(i) => write!(f, "a:{i}"),
            Symbol::VertexRow(i, h) => write!(f, "ar:{i}:{h}"),
            Symbol::Edge(i, j) => write!(f, "t:{i}:{j}"),
            Symbol::Free(i) => write!(f, "u:{i}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad symbol token {s:?}"));
        let num = |t: &str| t.parse::<u32>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["0"] => Ok(Symbol::ZERO),
            ["1"] => Ok(Symbol::ONE),
            ["a", i] => Ok(Symbol::Vertex(num(i)?)),
            ["ar", i, h] => Ok(Symbol::VertexRow(num(i)?, num(h)?)),
            ["t", i, j] => Ok(Symbol::Edge(num(i)?, num(j)?)),
            ["u", i] => Ok(Symbol::Free(num(i)?)),
            _ => Err(bad()),
        }
    }
}

/// A fixed-length vector of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row(Vec<Symbol>);

impl Row {
    pub fn new(entries: Vec<Symbol>) -> Self {
        Row(entries)
    }

    /// The all-`0` binary row.
    pub fn zeros(len: usize) -> Self {
        Row(vec![Symbol::ZERO; len])
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, column: usize) -> Option<Symbol> {
        self.0.get(column).copied()
    }

    pub(crate) fn set(&mut self, column: usize, symbol: Symbol) {
        self.0[column] = symbol;
    }

    /// Number of `1` entries; only meaningful for binary rows.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::ONE).count()
    }

    /// Number of columns where `self` and `other` differ.
    pub fn hamming(&self, other: &Row) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }
}

impl From<Vec<Symbol>> for Row {
    fn from(entries: Vec<Symbol>) -> Self {
        Row(entries)
    }
}

/// Hamming distance between two equal-length rows.
pub fn hamming(r1: &Row, r2: &Row) -> Result<usize> {
    r1.hamming(r2)
}

/// A partition of row indices into clusters.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clustering {
    clusters: Vec<Vec<usize>>,
}

impl Clustering {
    pub fn new(clusters: Vec<Vec<usize>>) -> Self {
        Clustering { clusters }
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn into_clusters(self) -> Vec<Vec<usize>> {
        self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// Checks that the clusters are nonempty, disjoint and cover `0..rows`.
    pub fn validate(&self, rows: usize) -> Result<()> {
        let mut seen = vec![false; rows];
        for (c, cluster) in self.clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidPartition(format!("cluster {c} is empty")));
            }
            for &r in cluster {
                if r >= rows {
                    return Err(Error::InvalidPartition(format!(
                        "cluster {c} holds row {r}, but there are only {rows} rows"
                    )));
                }
                if std::mem::replace(&mut seen[r], true) {
                    return Err(Error::InvalidPartition(format!("row {r} appears twice")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "row {missing} is in no cluster"
            )));
        }
        Ok(())
    }

    /// Cluster index of every row. Assumes a valid partition of `0..rows`.
    pub fn assignment(&self, rows: usize) -> Vec<usize> {
        let mut owner = vec![usize::MAX; rows];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &r in cluster {
                owner[r] = c;
            }
        }
        owner
    }

    /// Same partition with sorted clusters, ordered by smallest member.
    pub fn normalized(&self) -> Clustering {
        let mut clusters: Vec<Vec<usize>> = self
            .clusters
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        clusters.sort();
        Clustering { clusters }
    }

    /// The partition as a set of sets, for order-insensitive comparison.
    pub fn as_set(&self) -> BTreeSet<BTreeSet<usize>> {
        self.clusters
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }
}

impl From<Vec<Vec<usize>>> for Clustering {
    fn from(clusters: Vec<Vec<usize>>) -> Self {
        Clustering::new(clusters)
    }
}

/// A table of equal-length rows together with the anonymity parameter `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    rows: Vec<Row>,
    k: usize,
    width: usize,
}

impl Instance {
    pub fn new(rows: Vec<Row>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if rows.len() < k {
            return Err(Error::TooFewRows {
                rows: rows.len(),
                k,
            });
        }
        let width = rows[0].len();
        if width == 0 {
            return Err(Error::EmptyRow);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::LengthMismatch {
                left: width,
                right: bad.len(),
            });
        }
        Ok(Instance { rows, k, width })
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &Row {
        &self.rows[index]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_cluster(&self, cluster: &[usize]) -> Result<()> {
        if cluster.is_empty() {
            return Err(Error::EmptyCluster);
        }
        if let Some(&index) = cluster.iter().find(|&&r| r >= self.rows.len()) {
            return Err(Error::RowOutOfRange {
                index,
                rows: self.rows.len(),
            });
        }
        Ok(())
    }

    /// Per-column flag: `true` when the rows of `cluster` disagree there.
    pub fn suppressed_mask(&self, cluster: &[usize]) -> Result<Vec<bool>> {
        self.check_cluster(cluster)?;
        let first = self.rows[cluster[0]].entries();
        Ok((0..self.width)
            .map(|col| {
                cluster[1..]
                    .iter()
                    .any(|&r| self.rows[r].entries()[col] != first[col])
            })
            .collect())
    }

    /// Number of columns on which the rows of `cluster` do not all agree.
    pub fn suppressed_columns(&self, cluster: &[usize]) -> Result<usize> {
        self.check_cluster(cluster)?;
        let first = self.rows[cluster[0]].entries();
        let rest: Vec<&[Symbol]> = cluster[1..]
            .iter()
            .map(|&r| self.rows[r].entries())
            .collect();
        Ok((0..self.width)
            .filter(|&col| rest.iter().any(|row| row[col] != first[col]))
            .count())
    }

    /// `|cluster| * suppressed_columns(cluster)`.
    pub fn cluster_cost(&self, cluster: &[usize]) -> Result<u64> {
        Ok((cluster.len() * self.suppressed_columns(cluster)?) as u64)
    }

    /// `|cluster| * max pairwise Hamming distance`, never above `cluster_cost`.
    pub fn cluster_lower_bound(&self, cluster: &[usize]) -> Result<u64> {
        self.check_cluster(cluster)?;
        let mut max = 0;
        for (a, &ra) in cluster.iter().enumerate() {
            for &rb in &cluster[a + 1..] {
                max = max.max(self.rows[ra].hamming(&self.rows[rb])?);
            }
        }
        Ok((cluster.len() * max) as u64)
    }

    /// Total suppression cost of a partition of all rows.
    pub fn clustering_cost(&self, p: &Clustering) -> Result<u64> {
        p.validate(self.rows.len())?;
        p.clusters().iter().map(|c| self.cluster_cost(c)).sum()
    }

    /// Whether every cluster of the partition has at least `k` rows.
    pub fn is_feasible(&self, p: &Clustering) -> Result<bool> {
        p.validate(self.rows.len())?;
        Ok(p.clusters().iter().all(|c| c.len() >= self.k))
    }

    pub(crate) fn require_feasible(&self, p: &Clustering) -> Result<()> {
        p.validate(self.rows.len())?;
        match p.clusters().iter().position(|c| c.len() < self.k) {
            Some(c) => Err(Error::Infeasible {
                cluster: c,
                size: p.clusters()[c].len(),
                k: self.k,
            }),
            None => Ok(()),
        }
    }

    /// Splits every cluster larger than `2k - 1` so all sizes land in
    /// `[k, 2k - 1]`.
    ///
    /// An oversized cluster is sorted and the first `k` rows are peeled off
    /// repeatedly. A subset of a cluster never suppresses more columns than the
    /// cluster itself, so the total cost cannot grow. Clusters already within
    /// bounds are returned untouched.
    pub fn normalize_cluster_sizes(&self, p: &Clustering) -> Result<Clustering> {
        self.require_feasible(p)?;
        let k = self.k;
        let mut out = Vec::with_capacity(p.len());
        for cluster in p.clusters() {
            if cluster.len() < 2 * k {
                out.push(cluster.clone());
                continue;
            }
            let mut rest = cluster.clone();
            rest.sort_unstable();
            while rest.len() > 2 * k - 1 {
                let tail = rest.split_off(k);
                out.push(rest);
                rest = tail;
            }
            out.push(rest);
        }
        Ok(Clustering::new(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Row {
        Row::new(s.chars().map(|c| Symbol::Binary(c == '1')).collect())
    }

    fn table(rows: &[&str], k: usize) -> Instance {
        Instance::new(rows.iter().map(|r| bits(r)).collect(), k).unwrap()
    }

    #[test]
    fn symbol_tokens() {
        for tok in ["0", "1", "a:3", "ar:2:5", "t:1:4", "u:2"] {
            let s: Symbol = tok.parse().unwrap();
            assert_eq!(s.to_string(), tok);
        }
        assert!("a".parse::<Symbol>().is_err());
        assert!("x:1".parse::<Symbol>().is_err());
        assert!("t:1".parse::<Symbol>().is_err());
        assert_ne!(Symbol::Vertex(1), Symbol::Free(1));
        assert_ne!(Symbol::Edge(1, 2), Symbol::VertexRow(1, 2));
    }

    #[test]
    fn hamming_basics() {
        let r = bits("0110");
        assert_eq!(hamming(&r, &r).unwrap(), 0);
        assert_eq!(hamming(&bits("000"), &bits("011")).unwrap(), 2);
        assert_eq!(
            hamming(&bits("00"), &bits("000")),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn cluster_cost_examples() {
        let inst = table(&["000", "001", "011", "000", "000", "000"], 3);
        // Columns 2 and 3 disagree, three rows pay two entries each.
        assert_eq!(inst.cluster_cost(&[0, 1, 2]).unwrap(), 6);
        assert_eq!(inst.cluster_cost(&[0, 3, 4, 5]).unwrap(), 0);
        assert_eq!(inst.cluster_lower_bound(&[0, 1, 2]).unwrap(), 6);
        assert_eq!(inst.cluster_cost(&[]), Err(Error::EmptyCluster));
        assert_eq!(inst.cluster_lower_bound(&[]), Err(Error::EmptyCluster));
        assert!(matches!(
            inst.cluster_cost(&[9]),
            Err(Error::RowOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn cluster_cost_matches_column_scan() {
        let inst = table(&["10110", "10011", "00110", "11111"], 2);
        let cluster = [0, 1, 2, 3];
        let mut suppressed = 0;
        for col in 0..5 {
            let vals: BTreeSet<_> = cluster
                .iter()
                .map(|&r| inst.row(r).entries()[col])
                .collect();
            if vals.len() > 1 {
                suppressed += 1;
            }
        }
        assert_eq!(inst.cluster_cost(&cluster).unwrap(), 4 * suppressed);
    }

    #[test]
    fn partition_validation() {
        let inst = table(&["0", "0", "1", "1"], 2);
        assert_eq!(
            inst.clustering_cost(&vec![vec![0, 1, 2, 3]].into())
                .unwrap(),
            4
        );
        assert!(matches!(
            inst.clustering_cost(&vec![vec![0, 1], vec![1, 2, 3]].into()),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            inst.clustering_cost(&vec![vec![0, 1], vec![2]].into()),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            inst.is_feasible(&vec![vec![0, 1], vec![], vec![2, 3]].into()),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn feasibility() {
        let inst = table(&["0"; 7], 3);
        assert!(inst
            .is_feasible(&vec![vec![0, 1, 2], vec![3, 4, 5, 6]].into())
            .unwrap());
        assert!(!inst
            .is_feasible(&vec![vec![0, 1], vec![2, 3, 4, 5, 6]].into())
            .unwrap());
    }

    #[test]
    fn instance_construction() {
        assert_eq!(
            Instance::new(vec![bits("0"), bits("1")], 3),
            Err(Error::TooFewRows { rows: 2, k: 3 })
        );
        assert!(matches!(
            Instance::new(vec![bits("0"), bits("11")], 1),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(Instance::new(vec![bits("0")], 0), Err(Error::ZeroK));
        assert_eq!(
            Instance::new(vec![Row::new(vec![])], 1),
            Err(Error::EmptyRow)
        );
    }

    #[test]
    fn normalize_passes_small_clusters_through() {
        let inst = table(&["0", "1", "0", "1", "1", "0", "0", "1"], 3);
        let p: Clustering = vec![vec![2, 0, 1], vec![7, 3, 4, 5, 6]].into();
        assert_eq!(inst.normalize_cluster_sizes(&p).unwrap(), p);
    }

    #[test]
    fn normalize_splits_identical_rows_for_free() {
        let inst = table(&["101"; 6], 3);
        let p: Clustering = vec![vec![0, 1, 2, 3, 4, 5]].into();
        let q = inst.normalize_cluster_sizes(&p).unwrap();
        assert_eq!(q.sizes(), vec![3, 3]);
        assert_eq!(inst.clustering_cost(&q).unwrap(), 0);
    }

    #[test]
    fn normalize_seven_rows() {
        let inst = table(&["0000", "0001", "0011", "0111", "1111", "1110", "1100"], 3);
        let p: Clustering = vec![vec![6, 5, 4, 3, 2, 1, 0]].into();
        let q = inst.normalize_cluster_sizes(&p).unwrap();
        assert_eq!(q.clusters(), &[vec![0, 1, 2], vec![3, 4, 5, 6]]);
        // 7 * 4 = 28 before; {0,1,2} suppresses 2 columns, {3..6} suppresses 3.
        assert_eq!(inst.clustering_cost(&p).unwrap(), 28);
        assert_eq!(inst.clustering_cost(&q).unwrap(), 3 * 2 + 4 * 3);
    }

    #[test]
    fn normalize_rejects_infeasible() {
        let inst = table(&["0"; 4], 3);
        assert_eq!(
            inst.normalize_cluster_sizes(&vec![vec![0, 1], vec![2, 3]].into()),
            Err(Error::Infeasible {
                cluster: 0,
                size: 2,
                k: 3
            })
        );
    }
}
