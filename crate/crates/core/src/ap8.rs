//! Reduction from vertex cover on cubic graphs to 4-anonymity over rows of
//! length 8.
//!
//! The eight columns form four edge blocks of two columns each. Every vertex
//! `v_i` is given a block `b(R_i)` such that adjacent vertices get different
//! blocks, and contributes five rows `R_i`:
//!
//! * columns of `b(R_i)` and every odd column hold `a_i`;
//! * the three even columns outside `b(R_i)` of row `h` hold `a_{i,h}`.
//!
//! Every edge `(v_i, v_j)` contributes one edge row with `a_i` in `b(R_i)`,
//! `a_j` in `b(R_j)` and `t_{i,j}` elsewhere, and four free rows `u_1..u_4`
//! fill the rest. Vertex and free labels in symbols are 1-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{CubicGraph, VertexCover};
use crate::model::{Clustering, Instance, Row, Symbol};

pub const WIDTH: usize = 8;
pub const ROWS_PER_VERTEX: usize = 5;
pub const FREE_ROWS: usize = 4;

/// Edge block (1..=4) of every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAssignment {
    blocks: Vec<u8>,
}

impl BlockAssignment {
    pub fn block(&self, v: usize) -> u8 {
        self.blocks[v]
    }

    pub fn blocks(&self) -> &[u8] {
        &self.blocks
    }

    /// The two 0-based columns of the block of `v`.
    pub fn columns(&self, v: usize) -> [usize; 2] {
        let b = self.blocks[v] as usize;
        [2 * b - 2, 2 * b - 1]
    }

    pub fn is_proper(&self, g: &CubicGraph) -> bool {
        g.edges()
            .iter()
            .all(|&(u, v)| self.blocks[u] != self.blocks[v])
    }
}

/// Greedy colouring in ascending vertex order with the smallest free block.
pub fn assign_blocks(g: &CubicGraph) -> BlockAssignment {
    let mut blocks = vec![0u8; g.n()];
    for v in 0..g.n() {
        let used: Vec<u8> = g.neighbors(v).iter().map(|&u| blocks[u]).collect();
        blocks[v] = (1..=4)
            .find(|b| !used.contains(b))
            .expect("degree 3 leaves a block");
    }
    BlockAssignment { blocks }
}

/// Which part of the construction produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance4 {
    /// Row `h` (1..=5) of `R_vertex`.
    VertexRow {
        #[serde(with = "crate::io::one_based")]
        vertex: usize,
        h: u8,
    },
    /// Edge row of graph edge `(i, j)`, `i < j`.
    EdgeRow {
        #[serde(with = "crate::io::one_based")]
        i: usize,
        #[serde(with = "crate::io::one_based")]
        j: usize,
    },
    /// Free row `index` (1..=4).
    FreeRow { index: u8 },
}

/// The 4-anonymity instance built from a cubic graph.
#[derive(Debug, Clone)]
pub struct ApInstance {
    graph: CubicGraph,
    blocks: BlockAssignment,
    instance: Instance,
    provenance: Vec<Provenance4>,
}

fn label(v: usize) -> u32 {
    v as u32 + 1
}

/// Builds the `5n + m + 4` rows of length 8 for `g`, with `k = 4`.
///
/// Rows are ordered `R_0`, `R_1`, ... (five each), then one edge row per graph
/// edge, then the four free rows.
pub fn build_4ap8_instance(g: &CubicGraph) -> ApInstance {
    let blocks = assign_blocks(g);
    let mut rows = Vec::with_capacity(ROWS_PER_VERTEX * g.n() + g.m() + FREE_ROWS);
    let mut provenance = Vec::with_capacity(rows.capacity());
    for v in 0..g.n() {
        let own = blocks.columns(v);
        for h in 1..=ROWS_PER_VERTEX as u8 {
            let row = (0..WIDTH)
                .map(|c| {
                    if own.contains(&c) || c % 2 == 0 {
                        Symbol::Vertex(label(v))
                    } else {
                        Symbol::VertexRow(label(v), h as u32)
                    }
                })
                .collect();
            rows.push(Row::new(row));
            provenance.push(Provenance4::VertexRow { vertex: v, h });
        }
    }
    for &(i, j) in g.edges() {
        let (bi, bj) = (blocks.columns(i), blocks.columns(j));
        let row = (0..WIDTH)
            .map(|c| {
                if bi.contains(&c) {
                    Symbol::Vertex(label(i))
                } else if bj.contains(&c) {
                    Symbol::Vertex(label(j))
                } else {
                    Symbol::Edge(label(i), label(j))
                }
            })
            .collect();
        rows.push(Row::new(row));
        provenance.push(Provenance4::EdgeRow { i, j });
    }
    for f in 1..=FREE_ROWS as u32 {
        rows.push(Row::new(vec![Symbol::Free(f); WIDTH]));
        provenance.push(Provenance4::FreeRow { index: f as u8 });
    }
    let instance = Instance::new(rows, 4).expect("a cubic graph yields at least 30 rows");
    ApInstance {
        graph: g.clone(),
        blocks,
        instance,
        provenance,
    }
}

impl ApInstance {
    /// Reassembles an instance from a graph and previously built rows.
    pub fn from_parts(
        graph: CubicGraph,
        instance: Instance,
        provenance: Vec<Provenance4>,
    ) -> Result<Self> {
        if provenance.len() != instance.len() {
            return Err(Error::MissingProvenance {
                expected: instance.len(),
                found: provenance.len(),
            });
        }
        if instance.width() != WIDTH {
            return Err(Error::LengthMismatch {
                left: WIDTH,
                right: instance.width(),
            });
        }
        Ok(ApInstance {
            blocks: assign_blocks(&graph),
            graph,
            instance,
            provenance,
        })
    }

    pub fn graph(&self) -> &CubicGraph {
        &self.graph
    }

    pub fn blocks(&self) -> &BlockAssignment {
        &self.blocks
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn provenance(&self) -> &[Provenance4] {
        &self.provenance
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    /// The five rows of `R_v`.
    pub fn vertex_rows(&self, v: usize) -> [usize; 5] {
        let s = ROWS_PER_VERTEX * v;
        [s, s + 1, s + 2, s + 3, s + 4]
    }

    pub fn edge_row(&self, edge: usize) -> usize {
        ROWS_PER_VERTEX * self.n() + edge
    }

    pub fn free_rows(&self) -> [usize; 4] {
        let s = ROWS_PER_VERTEX * self.n() + self.m();
        [s, s + 1, s + 2, s + 3]
    }

    /// Edge rows of the three edges at `v` (`E(R_v)`), in edge order.
    pub fn incident_edge_rows(&self, v: usize) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .graph
            .neighbors(v)
            .iter()
            .map(|&u| self.edge_row(self.graph.edge_index(v, u).unwrap()))
            .collect();
        rows.sort_unstable();
        rows
    }

    /// Vertex owning a row of some `R_v`.
    fn vertex_of(&self, row: usize) -> Option<usize> {
        match self.provenance[row] {
            Provenance4::VertexRow { vertex, .. } => Some(vertex),
            _ => None,
        }
    }

    /// Whether `row` belongs to `R_v ∪ E(R_v)`.
    fn is_local_to(&self, row: usize, v: usize) -> bool {
        match self.provenance[row] {
            Provenance4::VertexRow { vertex, .. } => vertex == v,
            Provenance4::EdgeRow { i, j } => i == v || j == v,
            Provenance4::FreeRow { .. } => false,
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::IndexOutOfRange(format!(
                "vertex {v} with only {} vertices",
                self.n()
            )));
        }
        Ok(())
    }
}

/// `12(n - p) + 15p + 8m + 32`: cost of the canonical solution whose red
/// vertices are a cover of size `p`.
pub fn canonical_cost_4ap8(n: usize, m: usize, p: usize) -> u64 {
    (12 * (n - p) + 15 * p + 8 * m + 32) as u64
}

/// Cover size encoded by a canonical cost, if the cost has that form.
pub fn cover_size_from_cost(n: usize, m: usize, cost: u64) -> Option<usize> {
    let base = (12 * n + 8 * m + 32) as u64;
    let extra = cost.checked_sub(base)?;
    (extra % 3 == 0 && extra / 3 <= n as u64).then_some((extra / 3) as usize)
}

/// Red solution: `R_v` as a single cluster.
pub fn build_red(inst: &ApInstance, v: usize) -> Result<Vec<Vec<usize>>> {
    inst.check_vertex(v)?;
    Ok(vec![inst.vertex_rows(v).to_vec()])
}

/// Black solution: four rows of `R_v`, then the fifth row with `E(R_v)`.
///
/// `black` marks vertices already holding black solutions; a black neighbour
/// would need the shared edge row too.
pub fn build_black(inst: &ApInstance, v: usize, black: &[bool]) -> Result<Vec<Vec<usize>>> {
    inst.check_vertex(v)?;
    if let Some(&u) = inst
        .graph
        .neighbors(v)
        .iter()
        .find(|&&u| black.get(u) == Some(&true))
    {
        return Err(Error::EdgeRowConflict {
            vertex: v,
            neighbor: u,
        });
    }
    let rows = inst.vertex_rows(v);
    let mut second = vec![rows[4]];
    second.extend(inst.incident_edge_rows(v));
    Ok(vec![rows[..4].to_vec(), second])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Black,
}

/// A canonical solution: a red or black solution per vertex plus the filler.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Canonical4 {
    pub colors: Vec<Color>,
}

impl Canonical4 {
    pub fn validate(&self, inst: &ApInstance) -> Result<()> {
        if self.colors.len() != inst.n() {
            return Err(Error::NotCanonical(format!(
                "{} colours for {} vertices",
                self.colors.len(),
                inst.n()
            )));
        }
        for &(u, v) in inst.graph.edges() {
            if self.colors[u] == Color::Black && self.colors[v] == Color::Black {
                return Err(Error::EdgeRowConflict {
                    vertex: v,
                    neighbor: u,
                });
            }
        }
        Ok(())
    }

    /// Red and black clusters in vertex order, then the filler cluster.
    pub fn expand(&self, inst: &ApInstance) -> Result<Clustering> {
        self.validate(inst)?;
        let mut clusters = Vec::new();
        let mut black = vec![false; inst.n()];
        let mut consumed = vec![false; inst.m()];
        for (v, c) in self.colors.iter().enumerate() {
            match c {
                Color::Red => clusters.extend(build_red(inst, v)?),
                Color::Black => {
                    clusters.extend(build_black(inst, v, &black)?);
                    black[v] = true;
                    for u in inst.graph.neighbors(v) {
                        consumed[inst.graph.edge_index(v, u).unwrap()] = true;
                    }
                }
            }
        }
        let mut filler = inst.free_rows().to_vec();
        filler.extend(
            (0..inst.m())
                .filter(|&e| !consumed[e])
                .map(|e| inst.edge_row(e)),
        );
        filler.sort_unstable();
        clusters.push(filler);
        Ok(Clustering::new(clusters))
    }

    pub fn cover(&self) -> VertexCover {
        VertexCover::new(
            self.colors
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == Color::Red)
                .map(|(v, _)| v),
        )
    }
}

/// Canonical clustering with red solutions on `cover` and black elsewhere.
pub fn vc_to_solution_4ap8(inst: &ApInstance, cover: &VertexCover) -> Result<Clustering> {
    cover.check(&inst.graph)?;
    let colors = (0..inst.n())
        .map(|v| {
            if cover.contains(v) {
                Color::Red
            } else {
                Color::Black
            }
        })
        .collect();
    Canonical4 { colors }.expand(inst)
}

/// Reads the red/black structure back out of a clustering.
pub fn classify_4ap8(inst: &ApInstance, p: &Clustering) -> Result<Canonical4> {
    let rows = inst.instance.len();
    p.validate(rows)?;
    let owner = p.assignment(rows);
    let free = inst.free_rows();
    let filler = owner[free[0]];
    if free.iter().any(|&r| owner[r] != filler) {
        return Err(Error::NotCanonical(
            "free rows are split across clusters".into(),
        ));
    }
    if let Some(&r) = p.clusters()[filler]
        .iter()
        .find(|&&r| matches!(inst.provenance[r], Provenance4::VertexRow { .. }))
    {
        return Err(Error::NotCanonical(format!(
            "filler cluster {filler} holds vertex row {r}"
        )));
    }
    let mut claimed = vec![false; p.len()];
    claimed[filler] = true;
    let mut colors = Vec::with_capacity(inst.n());
    for v in 0..inst.n() {
        let rv = inst.vertex_rows(v);
        let mut hosts: Vec<usize> = rv.iter().map(|&r| owner[r]).collect();
        hosts.sort_unstable();
        hosts.dedup();
        let fail = |c: usize| {
            Error::NotCanonical(format!(
                "cluster {c} is neither a red nor a black cluster of vertex {v}"
            ))
        };
        match *hosts.as_slice() {
            [c] => {
                if p.clusters()[c].len() != 5 {
                    return Err(fail(c));
                }
                claimed[c] = true;
                colors.push(Color::Red);
            }
            [c1, c2] => {
                let in_c1 = rv.iter().filter(|&&r| owner[r] == c1).count();
                let (four, one) = if in_c1 == 4 { (c1, c2) } else { (c2, c1) };
                let in_four = rv.iter().filter(|&&r| owner[r] == four).count();
                if p.clusters()[four].len() != 4 || in_four != 4 {
                    return Err(fail(four));
                }
                let mut expected: Vec<usize> =
                    rv.iter().copied().filter(|&r| owner[r] == one).collect();
                expected.extend(inst.incident_edge_rows(v));
                expected.sort_unstable();
                let mut actual = p.clusters()[one].clone();
                actual.sort_unstable();
                if actual != expected {
                    return Err(fail(one));
                }
                claimed[four] = true;
                claimed[one] = true;
                colors.push(Color::Black);
            }
            _ => return Err(fail(hosts[2])),
        }
    }
    if let Some(c) = claimed.iter().position(|&b| !b) {
        return Err(Error::NotCanonical(format!(
            "cluster {c} belongs to no red, black or filler cluster"
        )));
    }
    let canonical = Canonical4 { colors };
    canonical.validate(inst)?;
    Ok(canonical)
}

pub fn is_canonical_4ap8(inst: &ApInstance, p: &Clustering) -> bool {
    classify_4ap8(inst, p).is_ok()
}

/// The red vertices of a canonical `p`.
pub fn solution_to_vc_4ap8(inst: &ApInstance, p: &Clustering) -> Result<VertexCover> {
    let cover = classify_4ap8(inst, p)?.cover();
    cover.check(&inst.graph)?;
    Ok(cover)
}

/// Costs recorded after each canonicalization stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Canonicalization {
    pub clustering: Clustering,
    pub input_cost: u64,
    /// `(stage name, cost after the stage)`, in order.
    pub stages: Vec<(&'static str, u64)>,
}

/// Working partition of the canonicalization pipeline.
struct Work<'a> {
    inst: &'a ApInstance,
    clusters: Vec<Vec<usize>>,
    filler: usize,
}

impl Work<'_> {
    fn cost(&self) -> u64 {
        self.clusters
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| self.inst.instance.cluster_cost(c).unwrap())
            .sum()
    }

    fn owner(&self) -> Vec<usize> {
        let mut owner = vec![usize::MAX; self.inst.instance.len()];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &r in cluster {
                owner[r] = c;
            }
        }
        owner
    }

    fn all_suppressed(&self, c: usize) -> bool {
        !self.clusters[c].is_empty()
            && self
                .inst
                .instance
                .suppressed_columns(&self.clusters[c])
                .unwrap()
                == WIDTH
    }

    fn hosts(&self, v: usize) -> Vec<usize> {
        let owner = self.owner();
        let mut hosts: Vec<usize> = self.inst.vertex_rows(v).iter().map(|&r| owner[r]).collect();
        hosts.sort_unstable();
        hosts.dedup();
        hosts
    }

    fn move_all_to_filler(&mut self, c: usize) {
        let rows = std::mem::take(&mut self.clusters[c]);
        self.clusters[self.filler].extend(rows);
    }

    fn move_rows(&mut self, rows: &[usize], from: usize, to: usize) {
        self.clusters[from].retain(|r| !rows.contains(r));
        self.clusters[to].extend_from_slice(rows);
    }

    /// Merges every cluster whose rows all have cost 8 into one filler.
    fn merge_full_clusters(&mut self) {
        let full: Vec<usize> = (0..self.clusters.len())
            .filter(|&c| self.all_suppressed(c))
            .collect();
        self.clusters.push(Vec::new());
        self.filler = self.clusters.len() - 1;
        for c in full {
            self.move_all_to_filler(c);
        }
    }

    /// For an `R_v` spread over more than two clusters, empties its fully
    /// suppressed host clusters into the filler.
    fn shrink_hosts(&mut self) {
        for v in 0..self.inst.n() {
            let hosts = self.hosts(v);
            if hosts.len() > 2 {
                for c in hosts {
                    if c != self.filler && self.all_suppressed(c) {
                        self.move_all_to_filler(c);
                    }
                }
            }
        }
    }

    /// Takes `R_v` rows out of the filler.
    fn empty_filler_of_vertex_rows(&mut self) -> Result<()> {
        for v in 0..self.inst.n() {
            let hosts = self.hosts(v);
            if !hosts.contains(&self.filler) {
                continue;
            }
            let rv = self.inst.vertex_rows(v);
            let in_filler: Vec<usize> = rv
                .iter()
                .copied()
                .filter(|r| self.clusters[self.filler].contains(r))
                .collect();
            let others: Vec<usize> = hosts.into_iter().filter(|&c| c != self.filler).collect();
            match others.as_slice() {
                [] => {
                    self.clusters[self.filler].retain(|r| !rv.contains(r));
                    self.clusters.push(rv.to_vec());
                }
                &[c] => self.move_rows(&in_filler, self.filler, c),
                _ => {
                    return Err(Error::NotCanonical(format!(
                        "rows of vertex {v} sit in the filler and {} other clusters",
                        others.len()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Rewrites every `R_v` into a red or a black solution.
    fn resolve_shapes(&mut self) -> Result<()> {
        for v in 0..self.inst.n() {
            let rv = self.inst.vertex_rows(v);
            let hosts = self.hosts(v);
            match *hosts.as_slice() {
                [c] => {
                    let extra: Vec<usize> = self.clusters[c]
                        .iter()
                        .copied()
                        .filter(|r| !rv.contains(r))
                        .collect();
                    let filler = self.filler;
                    self.move_rows(&extra, c, filler);
                }
                [c1, c2] => {
                    let count = |c: usize, w: &Work| {
                        rv.iter().filter(|r| w.clusters[c].contains(r)).count()
                    };
                    let (a, b) = (count(c1, self), count(c2, self));
                    let (four, one) = match (a, b) {
                        (4, 1) => (c1, c2),
                        (1, 4) => (c2, c1),
                        _ => {
                            // 3+2 split: rebuild as a black solution.
                            let edges = self.inst.incident_edge_rows(v);
                            let mut pool: Vec<usize> = std::mem::take(&mut self.clusters[c1]);
                            pool.extend(std::mem::take(&mut self.clusters[c2]));
                            pool.sort_unstable();
                            let mut expected: Vec<usize> =
                                rv.iter().chain(&edges).copied().collect();
                            expected.sort_unstable();
                            if pool != expected {
                                return Err(Error::NotCanonical(format!(
                                    "split of vertex {v} is not exactly its rows and edge rows"
                                )));
                            }
                            self.clusters[c1] = rv[..4].to_vec();
                            let mut second = vec![rv[4]];
                            second.extend(edges);
                            self.clusters[c2] = second;
                            continue;
                        }
                    };
                    if self.clusters[four].len() != 4 {
                        return Err(Error::NotCanonical(format!(
                            "cluster {four} mixes four rows of vertex {v} with other rows"
                        )));
                    }
                    let mut expected: Vec<usize> = self.inst.incident_edge_rows(v);
                    expected.extend(
                        rv.iter()
                            .copied()
                            .filter(|r| self.clusters[one].contains(r)),
                    );
                    expected.sort_unstable();
                    let mut actual = self.clusters[one].clone();
                    actual.sort_unstable();
                    if actual != expected {
                        return Err(Error::NotCanonical(format!(
                            "cluster {one} is not one row of vertex {v} with its edge rows"
                        )));
                    }
                }
                _ => {
                    return Err(Error::NotCanonical(format!(
                        "rows of vertex {v} spread over {} clusters",
                        hosts.len()
                    )))
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> Clustering {
        let mut clusters: Vec<Vec<usize>> = self
            .clusters
            .into_iter()
            .filter(|c| !c.is_empty())
            .collect();
        for c in &mut clusters {
            c.sort_unstable();
        }
        Clustering::new(clusters).normalized()
    }
}

/// Rewrites a feasible solution as a canonical one of no greater cost.
///
/// Stages, each on one working partition:
/// 1. merge all clusters whose rows all cost 8 into one filler cluster;
/// 2. for any `R_v` spread over more than two clusters, move its fully
///    suppressed host clusters to the filler;
/// 3. pull `R_v` rows out of the filler into their other host, or make `R_v`
///    its own cluster;
/// 4. turn `R_v` plus extra edge rows into `R_v` (extras go to the filler),
///    and a 3+2 split of `R_v` into a black solution.
pub fn canonicalize_4ap8(inst: &ApInstance, s: &Clustering) -> Result<Clustering> {
    Ok(canonicalize_4ap8_traced(inst, s)?.clustering)
}

/// [`canonicalize_4ap8`] with the cost after every stage.
pub fn canonicalize_4ap8_traced(inst: &ApInstance, s: &Clustering) -> Result<Canonicalization> {
    inst.instance.require_feasible(s)?;
    let input_cost = inst.instance.clustering_cost(s)?;
    let mut work = Work {
        inst,
        clusters: s.clusters().to_vec(),
        filler: usize::MAX,
    };
    let mut stages = Vec::with_capacity(4);
    work.merge_full_clusters();
    stages.push(("merge fully suppressed clusters", work.cost()));
    work.shrink_hosts();
    stages.push(("shrink vertex row hosts", work.cost()));
    work.empty_filler_of_vertex_rows()?;
    stages.push(("pull vertex rows out of the filler", work.cost()));
    work.resolve_shapes()?;
    stages.push(("resolve red and black shapes", work.cost()));
    let clustering = work.finish();
    classify_4ap8(inst, &clustering)?;
    Ok(Canonicalization {
        clustering,
        input_cost,
        stages,
    })
}

/// Outcome of the locality checks on one clustering.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub clusters: usize,
    /// Clusters whose rows cost less than 8.
    pub cheap_clusters: usize,
    /// Cheap clusters not inside any `R_v ∪ E(R_v)`.
    pub cluster_violations: Vec<usize>,
    pub vertex_rows: usize,
    /// Vertex rows with fewer than three suppressed even columns outside
    /// their block.
    pub row_violations: Vec<usize>,
}

impl LocalityReport {
    pub fn passed(&self) -> bool {
        self.cluster_violations.is_empty() && self.row_violations.is_empty()
    }
}

/// Checks that every cluster cheaper than 8 per row lies inside some
/// `R_v ∪ E(R_v)`, and that every vertex row has at least three suppressed
/// even columns outside its block.
pub fn verify_locality(inst: &ApInstance, p: &Clustering) -> Result<LocalityReport> {
    inst.instance.require_feasible(p)?;
    let mut report = LocalityReport {
        clusters: p.len(),
        ..LocalityReport::default()
    };
    for (c, cluster) in p.clusters().iter().enumerate() {
        let mask = inst.instance.suppressed_mask(cluster)?;
        if mask.iter().filter(|&&s| s).count() < WIDTH {
            report.cheap_clusters += 1;
            let local = (0..inst.n()).any(|v| cluster.iter().all(|&r| inst.is_local_to(r, v)));
            if !local {
                report.cluster_violations.push(c);
            }
        }
        for &r in cluster {
            if let Some(v) = inst.vertex_of(r) {
                report.vertex_rows += 1;
                let own = inst.blocks.columns(v);
                let even_outside = (0..WIDTH)
                    .filter(|&col| col % 2 == 1 && !own.contains(&col) && mask[col])
                    .count();
                if even_outside < 3 {
                    report.row_violations.push(r);
                }
            }
        }
    }
    Ok(report)
}

/// Result of the exhaustive pair scan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PairLocality {
    pub pairs: usize,
    /// Pairs at distance below 8.
    pub close_pairs: usize,
    /// Close pairs not inside a common `R_v ∪ E(R_v)`.
    pub violations: Vec<(usize, usize)>,
}

/// Checks that rows at distance below 8 always share some `R_v ∪ E(R_v)`.
pub fn verify_pairwise_locality(inst: &ApInstance) -> PairLocality {
    use rayon::prelude::*;
    let rows = inst.instance.rows();
    (0..rows.len())
        .into_par_iter()
        .map(|a| {
            let mut out = PairLocality::default();
            for b in a + 1..rows.len() {
                out.pairs += 1;
                if rows[a].hamming(&rows[b]).unwrap() < WIDTH {
                    out.close_pairs += 1;
                    if !(0..inst.n()).any(|v| inst.is_local_to(a, v) && inst.is_local_to(b, v)) {
                        out.violations.push((a, b));
                    }
                }
            }
            out
        })
        .reduce(PairLocality::default, |mut x, y| {
            x.pairs += y.pairs;
            x.close_pairs += y.close_pairs;
            x.violations.extend(y.violations);
            x
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Builtin;

    fn k4() -> ApInstance {
        build_4ap8_instance(&Builtin::K4.graph())
    }

    #[test]
    fn blocks_are_proper() {
        for b in Builtin::ALL {
            let g = b.graph();
            let blocks = assign_blocks(&g);
            assert!(blocks.is_proper(&g), "{}", b.name());
            assert!(blocks.blocks().iter().all(|b| (1..=4).contains(b)));
        }
        let mut k4: Vec<u8> = assign_blocks(&Builtin::K4.graph()).blocks().to_vec();
        k4.sort();
        assert_eq!(k4, vec![1, 2, 3, 4]);
    }

    #[test]
    fn k4_rows() {
        let inst = k4();
        assert_eq!(inst.instance().len(), 30);
        let rows = inst.instance().rows();
        let d = |a: usize, b: usize| rows[a].hamming(&rows[b]).unwrap();
        for v in 0..4 {
            let rv = inst.vertex_rows(v);
            for a in 0..5 {
                for b in a + 1..5 {
                    assert_eq!(d(rv[a], rv[b]), 3);
                }
            }
            for u in v + 1..4 {
                for &a in &rv {
                    for &b in &inst.vertex_rows(u) {
                        assert_eq!(d(a, b), 8);
                    }
                }
            }
        }
        for f in inst.free_rows() {
            for r in 0..30 {
                if r != f {
                    assert_eq!(d(f, r), 8);
                }
            }
        }
        assert!(inst
            .instance()
            .is_feasible(&Clustering::new(vec![(0..30).collect()]))
            .unwrap());
    }

    #[test]
    fn row_symbols() {
        let inst = k4();
        let r = inst.instance().row(0);
        let own = inst.blocks().columns(0);
        for c in 0..WIDTH {
            let expected = if own.contains(&c) || c % 2 == 0 {
                Symbol::Vertex(1)
            } else {
                Symbol::VertexRow(1, 1)
            };
            assert_eq!(r.get(c), Some(expected));
        }
        let e = inst.instance().row(inst.edge_row(0));
        let (i, j) = inst.graph().edges()[0];
        let t = (0..WIDTH)
            .filter(|&c| e.get(c) == Some(Symbol::Edge(label(i), label(j))))
            .count();
        assert_eq!(t, 4);
    }

    #[test]
    fn red_and_black_costs() {
        let inst = k4();
        let cost = |c: &Vec<usize>| inst.instance().cluster_cost(c).unwrap();
        assert_eq!(cost(&build_red(&inst, 0).unwrap()[0]), 15);
        let black = build_black(&inst, 0, &[false; 4]).unwrap();
        assert_eq!(cost(&black[0]), 12);
        assert_eq!(cost(&black[1]), 24);
        assert_eq!(
            build_black(&inst, 0, &[false, true, false, false]),
            Err(Error::EdgeRowConflict {
                vertex: 0,
                neighbor: 1
            })
        );
        assert_eq!(
            inst.instance()
                .suppressed_columns(&build_red(&inst, 2).unwrap()[0])
                .unwrap(),
            3
        );
    }

    #[test]
    fn round_trip_k4() {
        let inst = k4();
        let cover = VertexCover::new([0, 1, 2]);
        let p = vc_to_solution_4ap8(&inst, &cover).unwrap();
        let cost = inst.instance().clustering_cost(&p).unwrap();
        assert_eq!(cost, 137);
        assert_eq!(cover_size_from_cost(4, 6, cost), Some(3));
        assert_eq!(solution_to_vc_4ap8(&inst, &p).unwrap(), cover);
        let filler = p.clusters().last().unwrap();
        assert_eq!(filler.len(), 4 + 3);
        assert_eq!(inst.instance().cluster_cost(filler).unwrap(), 8 * 7);
        assert!(verify_locality(&inst, &p).unwrap().passed());
        assert!(vc_to_solution_4ap8(&inst, &VertexCover::new([0])).is_err());
    }

    #[test]
    fn every_cover_round_trips() {
        for b in Builtin::ALL {
            let g = b.graph();
            let inst = build_4ap8_instance(&g);
            for mask in 0u32..1 << g.n() {
                let cover = VertexCover::new((0..g.n()).filter(|v| mask & (1 << v) != 0));
                if !cover.is_cover(&g) {
                    continue;
                }
                let p = vc_to_solution_4ap8(&inst, &cover).unwrap();
                assert!(inst.instance().is_feasible(&p).unwrap());
                assert_eq!(
                    inst.instance().clustering_cost(&p).unwrap(),
                    canonical_cost_4ap8(g.n(), g.m(), cover.len())
                );
                assert_eq!(solution_to_vc_4ap8(&inst, &p).unwrap(), cover);
                assert_eq!(canonicalize_4ap8(&inst, &p).unwrap(), p.normalized());
            }
        }
    }

    #[test]
    fn split_three_two_becomes_black() {
        let inst = k4();
        let cover = VertexCover::new([1, 2, 3]);
        let p = vc_to_solution_4ap8(&inst, &cover).unwrap();
        // Vertex 0 is black; rebuild it as a 3+2 split with the edge rows
        // shared between both halves.
        let rv = inst.vertex_rows(0);
        let e = inst.incident_edge_rows(0);
        let mut clusters: Vec<Vec<usize>> = p
            .clusters()
            .iter()
            .filter(|c| !c.iter().any(|r| rv.contains(r)))
            .cloned()
            .collect();
        clusters.push(vec![rv[0], rv[1], rv[2], e[0]]);
        clusters.push(vec![rv[3], rv[4], e[1], e[2]]);
        let bad = Clustering::new(clusters);
        let cost = |c: &Clustering| inst.instance().clustering_cost(c).unwrap();
        assert_eq!(cost(&bad), cost(&p) + 12);
        let out = canonicalize_4ap8_traced(&inst, &bad).unwrap();
        assert_eq!(cost(&out.clustering), cost(&p));
        assert_eq!(solution_to_vc_4ap8(&inst, &out.clustering).unwrap(), cover);
    }

    #[test]
    fn vertex_set_with_extra_edges_sheds_them() {
        let inst = k4();
        let rv = inst.vertex_rows(0);
        let e = inst.incident_edge_rows(0);
        let mut clusters: Vec<Vec<usize>> = (1..4).map(|v| inst.vertex_rows(v).to_vec()).collect();
        let mut host = rv.to_vec();
        host.extend(&e[..2]);
        clusters.push(host);
        let mut filler = inst.free_rows().to_vec();
        filler.extend(
            (0..6)
                .map(|x| inst.edge_row(x))
                .filter(|r| !e[..2].contains(r)),
        );
        clusters.push(filler);
        let bad = Clustering::new(clusters);
        let cost = |c: &Clustering| inst.instance().clustering_cost(c).unwrap();
        // R_0 plus two edge rows costs 6 * 7 = 42 against 15 + 16.
        let good = canonicalize_4ap8(&inst, &bad).unwrap();
        assert_eq!(cost(&bad) - cost(&good), 42 - 31);
        assert_eq!(solution_to_vc_4ap8(&inst, &good).unwrap().len(), 4);
    }

    #[test]
    fn mixed_vertex_rows_are_not_local_but_cost_eight() {
        let inst = k4();
        let a = inst.vertex_rows(0);
        let b = inst.vertex_rows(1);
        let cluster = vec![a[0], a[1], b[0], b[1]];
        assert_eq!(inst.instance().suppressed_columns(&cluster).unwrap(), 8);
        let mut clusters = vec![
            cluster,
            vec![a[2], a[3], a[4], b[2], b[3], b[4]],
            inst.vertex_rows(2).to_vec(),
            inst.vertex_rows(3).to_vec(),
        ];
        let mut filler = inst.free_rows().to_vec();
        filler.extend((0..6).map(|x| inst.edge_row(x)));
        clusters.push(filler);
        let report = verify_locality(&inst, &Clustering::new(clusters)).unwrap();
        assert!(report.passed());
        assert_eq!(report.cheap_clusters, 2);
    }

    #[test]
    fn pairwise_locality_on_builtins() {
        for b in Builtin::ALL {
            let inst = build_4ap8_instance(&b.graph());
            let scan = verify_pairwise_locality(&inst);
            let rows = inst.instance().len();
            assert_eq!(scan.pairs, rows * (rows - 1) / 2);
            assert!(scan.violations.is_empty(), "{}", b.name());
            assert!(scan.close_pairs > 0);
        }
    }

    #[test]
    fn canonicalize_rejects_infeasible() {
        let inst = k4();
        let p = Clustering::new(vec![vec![0, 1, 2], (3..30).collect()]);
        assert!(matches!(
            canonicalize_4ap8(&inst, &p),
            Err(Error::Infeasible { .. })
        ));
    }
}
