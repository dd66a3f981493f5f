//! Reduction from vertex cover on cubic graphs to binary 3-anonymity.
//!
//! Every vertex `v_i` becomes a vertex gadget: seven core vertices
//! `c_{i,1..7}` joined by nine core edges, plus three jolly vertices, each tied
//! to one docking vertex `c_{i,1..3}` by four parallel jolly edges. Every graph
//! edge becomes an edge gadget joining one docking vertex on each side. Each
//! edge of this gadget graph is one binary row of length `30n`:
//!
//! | block        | columns (1-based)    | width |
//! |--------------|----------------------|-------|
//! | vertex `i`   | `21(i-1)+1 ..= 21i`  | 21    |
//! | jolly        | `21n+1 ..= 27n`      | 6n    |
//! | edge         | `27n+1 ..= 30n`      | 3n    |
//!
//! Gadget indices are 0-based; core vertices keep their labels `1..=7` and
//! docking slots their labels `1..=3`.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{CubicGraph, VertexCover};
use crate::model::{Clustering, Instance, Row, Symbol};

/// Core edges of every vertex gadget, as core-vertex label pairs.
///
/// `c4`, `c5`, `c7` and `c6` each touch exactly three of them, every docking
/// vertex exactly two.
pub const CORE_EDGES: [(u8, u8); 9] = [
    (1, 4),
    (2, 4),
    (2, 5),
    (3, 5),
    (1, 7),
    (3, 7),
    (4, 6),
    (5, 6),
    (6, 7),
];

/// Rows contributed by one vertex gadget: 9 core rows and 12 jolly rows.
pub const ROWS_PER_GADGET: usize = 21;
pub const JOLLY_COPIES: u8 = 4;

const TYPE_A_CENTERS: [u8; 3] = [4, 5, 7];
const TYPE_B_CENTER: u8 = 6;

/// Positions of the two core edges incident on docking vertex `x`.
fn docking_core_edges(x: u8) -> [usize; 2] {
    let mut it = CORE_EDGES
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| a == x || b == x)
        .map(|(e, _)| e);
    [it.next().unwrap(), it.next().unwrap()]
}

/// Core edges incident on core vertex `label`.
fn core_edges_at(label: u8) -> Vec<usize> {
    CORE_EDGES
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| a == label || b == label)
        .map(|(e, _)| e)
        .collect()
}

/// The two core neighbours of docking vertex `x`.
fn docking_neighbors(x: u8) -> [u8; 2] {
    docking_core_edges(x).map(|e| {
        let (a, b) = CORE_EDGES[e];
        if a == x {
            b
        } else {
            a
        }
    })
}

/// Column layout of the binary rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout3 {
    pub n: usize,
}

impl BlockLayout3 {
    pub const VERTEX_BLOCK: usize = 21;

    pub fn new(n: usize) -> Self {
        BlockLayout3 { n }
    }

    pub fn width(&self) -> usize {
        30 * self.n
    }

    /// First column (0-based) of the jolly block.
    pub fn jolly_offset(&self) -> usize {
        21 * self.n
    }

    /// First column (0-based) of the edge block.
    pub fn edge_offset(&self) -> usize {
        27 * self.n
    }

    fn check_gadget(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange(format!(
                "vertex gadget {i} with only {} gadgets",
                self.n
            )));
        }
        Ok(())
    }

    /// Columns of core vertex `c_{i,j}` inside vertex block `i`.
    pub fn vertex_columns(&self, i: usize, j: u8) -> Result<[usize; 3]> {
        self.check_gadget(i)?;
        if !(1..=7).contains(&j) {
            return Err(Error::IndexOutOfRange(format!("core vertex c_{j}")));
        }
        let start = Self::VERTEX_BLOCK * i + 3 * (j as usize - 1);
        Ok([start, start + 1, start + 2])
    }

    /// Columns of gadget `i` inside the edge block.
    pub fn gadget_columns(&self, i: usize) -> Result<[usize; 3]> {
        self.check_gadget(i)?;
        let start = self.edge_offset() + 3 * i;
        Ok([start, start + 1, start + 2])
    }

    /// Columns of jolly vertex `J_{i,x}` inside the jolly block.
    pub fn jolly_columns(&self, i: usize, x: u8) -> Result<[usize; 2]> {
        self.check_gadget(i)?;
        if !(1..=3).contains(&x) {
            return Err(Error::IndexOutOfRange(format!("jolly vertex J_{x}")));
        }
        let start = self.jolly_offset() + 6 * i + (x as usize - 1);
        Ok([start, start + 1])
    }

    fn check_row(&self, r: &Row) -> Result<()> {
        if r.len() != self.width() {
            return Err(Error::LengthMismatch {
                left: self.width(),
                right: r.len(),
            });
        }
        Ok(())
    }

    fn set_ones(r: &Row, columns: &[usize]) -> Row {
        let mut out = r.clone();
        for &c in columns {
            out.set(c, Symbol::ONE);
        }
        out
    }

    /// Vertex encoding of `c_{i,j}`.
    pub fn encode_vertex(&self, i: usize, j: u8, r: &Row) -> Result<Row> {
        self.check_row(r)?;
        Ok(Self::set_ones(r, &self.vertex_columns(i, j)?))
    }

    /// Gadget encoding of `VG_i`.
    pub fn encode_gadget(&self, i: usize, r: &Row) -> Result<Row> {
        self.check_row(r)?;
        Ok(Self::set_ones(r, &self.gadget_columns(i)?))
    }

    /// Jolly encoding of `J_{i,x}`.
    pub fn encode_jolly(&self, i: usize, x: u8, r: &Row) -> Result<Row> {
        self.check_row(r)?;
        Ok(Self::set_ones(r, &self.jolly_columns(i, x)?))
    }
}

/// One edge gadget: graph edge `edge` joining docking vertex `c_{i,x}` to
/// `c_{j,y}`, with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeGadget {
    pub edge: usize,
    pub i: usize,
    pub x: u8,
    pub j: usize,
    pub y: u8,
}

impl EdgeGadget {
    /// Docking slot used on gadget `g`, if the edge gadget touches it.
    pub fn slot_on(&self, g: usize) -> Option<u8> {
        if g == self.i {
            Some(self.x)
        } else if g == self.j {
            Some(self.y)
        } else {
            None
        }
    }
}

/// Docking layout of the gadget graph.
///
/// The neighbours of `v_i` in ascending order are attached to docking vertices
/// `c_{i,1}`, `c_{i,2}`, `c_{i,3}`, so every docking vertex ends exactly one
/// edge gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetGraph {
    n: usize,
    docking: Vec<[usize; 3]>,
    edge_gadgets: Vec<EdgeGadget>,
}

impl GadgetGraph {
    pub fn new(g: &CubicGraph) -> Self {
        let slot = |v: usize, w: usize| {
            g.neighbors(v)
                .iter()
                .position(|&u| u == w)
                .expect("adjacent") as u8
                + 1
        };
        let edge_gadgets: Vec<EdgeGadget> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(edge, &(i, j))| EdgeGadget {
                edge,
                i,
                x: slot(i, j),
                j,
                y: slot(j, i),
            })
            .collect();
        let mut docking = vec![[usize::MAX; 3]; g.n()];
        for eg in &edge_gadgets {
            docking[eg.i][eg.x as usize - 1] = eg.edge;
            docking[eg.j][eg.y as usize - 1] = eg.edge;
        }
        GadgetGraph {
            n: g.n(),
            docking,
            edge_gadgets,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_gadgets(&self) -> &[EdgeGadget] {
        &self.edge_gadgets
    }

    /// Edge gadget ending at docking vertex `c_{i,x}`.
    pub fn docked(&self, i: usize, x: u8) -> &EdgeGadget {
        &self.edge_gadgets[self.docking[i][x as usize - 1]]
    }
}

/// Which gadget-graph edge produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance3 {
    /// Core edge `(c_{gadget,x}, c_{gadget,y})`, `x < y`.
    CoreEdge {
        #[serde(with = "crate::io::one_based")]
        gadget: usize,
        x: u8,
        y: u8,
    },
    /// Copy `copy` (1..=4) of the jolly edge at docking vertex `c_{gadget,x}`.
    JollyEdge {
        #[serde(with = "crate::io::one_based")]
        gadget: usize,
        x: u8,
        copy: u8,
    },
    /// Edge gadget joining `c_{i,x}` and `c_{j,y}`.
    EdgeGadget {
        #[serde(with = "crate::io::one_based")]
        i: usize,
        #[serde(with = "crate::io::one_based")]
        j: usize,
        x: u8,
        y: u8,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GadgetVertex {
    Core(usize, u8),
    Jolly(usize, u8),
}

impl Provenance3 {
    pub fn is_jolly(&self) -> bool {
        matches!(self, Provenance3::JollyEdge { .. })
    }

    fn endpoints(&self) -> [GadgetVertex; 2] {
        match *self {
            Provenance3::CoreEdge { gadget, x, y } => {
                [GadgetVertex::Core(gadget, x), GadgetVertex::Core(gadget, y)]
            }
            Provenance3::JollyEdge { gadget, x, .. } => [
                GadgetVertex::Core(gadget, x),
                GadgetVertex::Jolly(gadget, x),
            ],
            Provenance3::EdgeGadget { i, j, x, y } => {
                [GadgetVertex::Core(i, x), GadgetVertex::Core(j, y)]
            }
        }
    }

    fn shares_vertex(&self, other: &Provenance3) -> bool {
        let theirs = other.endpoints();
        self.endpoints().iter().any(|v| theirs.contains(v))
    }

    fn rank(&self) -> u8 {
        match self {
            Provenance3::CoreEdge { .. } => 0,
            Provenance3::JollyEdge { .. } => 1,
            Provenance3::EdgeGadget { .. } => 2,
        }
    }
}

/// The binary instance built from a cubic graph, with its gadget bookkeeping.
#[derive(Debug, Clone)]
pub struct AbpInstance {
    graph: CubicGraph,
    gadgets: GadgetGraph,
    layout: BlockLayout3,
    instance: Instance,
    provenance: Vec<Provenance3>,
}

/// Builds the `21n + m` rows of length `30n` for `g`, with `k = 3`.
///
/// Rows are ordered gadget by gadget (9 core rows in [`CORE_EDGES`] order, then
/// the jolly rows of docking vertices 1, 2, 3, four copies each), followed by
/// one edge-gadget row per graph edge.
pub fn build_3abp_instance(g: &CubicGraph) -> AbpInstance {
    let n = g.n();
    let layout = BlockLayout3::new(n);
    let gadgets = GadgetGraph::new(g);
    let zero = Row::zeros(layout.width());
    let enc = |r: Result<Row>| r.expect("indices come from the layout");

    let mut rows = Vec::with_capacity(ROWS_PER_GADGET * n + g.m());
    let mut provenance = Vec::with_capacity(rows.capacity());
    for i in 0..n {
        for &(x, y) in &CORE_EDGES {
            let r = enc(layout.encode_vertex(i, x, &zero));
            let r = enc(layout.encode_vertex(i, y, &r));
            rows.push(enc(layout.encode_gadget(i, &r)));
            provenance.push(Provenance3::CoreEdge { gadget: i, x, y });
        }
        for x in 1..=3u8 {
            let [y, z] = docking_neighbors(x);
            let r = enc(layout.encode_vertex(i, x, &zero));
            let r = enc(layout.encode_vertex(i, y, &r));
            let r = enc(layout.encode_vertex(i, z, &r));
            let r = enc(layout.encode_gadget(i, &r));
            let r = enc(layout.encode_jolly(i, x, &r));
            for copy in 1..=JOLLY_COPIES {
                rows.push(r.clone());
                provenance.push(Provenance3::JollyEdge { gadget: i, x, copy });
            }
        }
    }
    for eg in gadgets.edge_gadgets() {
        let r = enc(layout.encode_vertex(eg.i, eg.x, &zero));
        let r = enc(layout.encode_vertex(eg.j, eg.y, &r));
        let r = enc(layout.encode_gadget(eg.i, &r));
        rows.push(enc(layout.encode_gadget(eg.j, &r)));
        provenance.push(Provenance3::EdgeGadget {
            i: eg.i,
            j: eg.j,
            x: eg.x,
            y: eg.y,
        });
    }
    let instance = Instance::new(rows, 3).expect("a cubic graph yields at least 25 rows");
    AbpInstance {
        graph: g.clone(),
        gadgets,
        layout,
        instance,
        provenance,
    }
}

impl AbpInstance {
    /// Reassembles an instance from a graph and previously built rows.
    pub fn from_parts(
        graph: CubicGraph,
        instance: Instance,
        provenance: Vec<Provenance3>,
    ) -> Result<Self> {
        if provenance.len() != instance.len() {
            return Err(Error::MissingProvenance {
                expected: instance.len(),
                found: provenance.len(),
            });
        }
        let layout = BlockLayout3::new(graph.n());
        if instance.width() != layout.width() {
            return Err(Error::LengthMismatch {
                left: layout.width(),
                right: instance.width(),
            });
        }
        Ok(AbpInstance {
            gadgets: GadgetGraph::new(&graph),
            graph,
            layout,
            instance,
            provenance,
        })
    }

    pub fn graph(&self) -> &CubicGraph {
        &self.graph
    }

    pub fn gadgets(&self) -> &GadgetGraph {
        &self.gadgets
    }

    pub fn layout(&self) -> BlockLayout3 {
        self.layout
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn provenance(&self) -> &[Provenance3] {
        &self.provenance
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    /// Row of core edge `CORE_EDGES[e]` in gadget `i`.
    pub fn core_row(&self, i: usize, e: usize) -> usize {
        ROWS_PER_GADGET * i + e
    }

    /// The four jolly rows of docking vertex `c_{i,x}`.
    pub fn jolly_rows(&self, i: usize, x: u8) -> [usize; 4] {
        let start = ROWS_PER_GADGET * i + CORE_EDGES.len() + 4 * (x as usize - 1);
        [start, start + 1, start + 2, start + 3]
    }

    /// Row of the edge gadget for graph edge `edge`.
    pub fn edge_gadget_row(&self, edge: usize) -> usize {
        ROWS_PER_GADGET * self.n() + edge
    }

    /// All 21 rows of vertex gadget `i`.
    pub fn gadget_rows(&self, i: usize) -> std::ops::Range<usize> {
        ROWS_PER_GADGET * i..ROWS_PER_GADGET * (i + 1)
    }

    fn check_gadget(&self, i: usize) -> Result<()> {
        self.layout.check_gadget(i)
    }

    /// The edge gadget a row encodes, if any.
    fn edge_of_row(&self, row: usize) -> Option<usize> {
        let start = ROWS_PER_GADGET * self.n();
        (row >= start).then(|| row - start)
    }
}

/// `99p + 81(n - p) + 12m`: cost of a canonical solution whose type-b gadgets
/// are the `p` vertices of a cover.
pub fn canonical_cost_3abp(n: usize, m: usize, p: usize) -> u64 {
    (99 * p + 81 * (n - p) + 12 * m) as u64
}

/// Distance requirement of one catalog case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistanceBound {
    Exactly(usize),
    AtLeast(usize),
}

impl DistanceBound {
    pub fn holds(&self, d: usize) -> bool {
        match *self {
            DistanceBound::Exactly(v) => d == v,
            DistanceBound::AtLeast(v) => d >= v,
        }
    }
}

/// The twelve pairwise distance cases, indexed `1..=12`.
pub const DISTANCE_CASES: [(u8, &str, DistanceBound); 12] = [
    (
        1,
        "core row vs row of another vertex gadget",
        DistanceBound::AtLeast(18),
    ),
    (2, "edge gadget vs jolly row", DistanceBound::AtLeast(14)),
    (3, "core rows sharing a vertex", DistanceBound::Exactly(6)),
    (
        4,
        "core rows of one gadget sharing no vertex",
        DistanceBound::Exactly(12),
    ),
    (
        5,
        "core row vs jolly row at a shared docking vertex",
        DistanceBound::Exactly(5),
    ),
    (
        6,
        "core row vs jolly row of the same gadget, disjoint",
        DistanceBound::AtLeast(11),
    ),
    (
        7,
        "core row vs edge gadget sharing a docking vertex",
        DistanceBound::Exactly(9),
    ),
    (
        8,
        "core row vs edge gadget sharing no vertex",
        DistanceBound::AtLeast(15),
    ),
    (9, "two edge gadgets", DistanceBound::AtLeast(18)),
    (
        10,
        "edge gadgets on four distinct vertex gadgets",
        DistanceBound::Exactly(24),
    ),
    (
        11,
        "jolly rows of different jolly sets",
        DistanceBound::AtLeast(12),
    ),
    (
        12,
        "jolly row vs any row sharing no vertex with it",
        DistanceBound::AtLeast(11),
    ),
];

/// Cases (1-based) that apply to a pair of rows, judged from provenance alone.
pub fn distance_cases(p: &Provenance3, q: &Provenance3) -> Vec<u8> {
    use Provenance3::*;
    let (p, q) = if p.rank() <= q.rank() { (p, q) } else { (q, p) };
    let share = p.shares_vertex(q);
    match (*p, *q) {
        (CoreEdge { gadget: i, .. }, CoreEdge { gadget: j, .. }) => {
            if i != j {
                vec![1]
            } else if share {
                vec![3]
            } else {
                vec![4]
            }
        }
        (CoreEdge { gadget: i, .. }, JollyEdge { gadget: j, .. }) => {
            if i != j {
                vec![1, 12]
            } else if share {
                vec![5]
            } else {
                vec![6, 12]
            }
        }
        (CoreEdge { .. }, EdgeGadget { .. }) => {
            if share {
                vec![7]
            } else {
                vec![8]
            }
        }
        (JollyEdge { .. }, JollyEdge { .. }) => {
            if share {
                vec![]
            } else {
                vec![11, 12]
            }
        }
        (JollyEdge { .. }, EdgeGadget { .. }) => {
            if share {
                vec![2]
            } else {
                vec![2, 12]
            }
        }
        (EdgeGadget { i: a, j: b, .. }, EdgeGadget { i: c, j: d, .. }) => {
            let gadgets: BTreeSet<usize> = [a, b, c, d].into_iter().collect();
            if gadgets.len() == 4 {
                vec![9, 10]
            } else {
                vec![9]
            }
        }
        _ => unreachable!("pairs are ordered by rank"),
    }
}

/// Tally of one distance case over an exhaustive pair scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CaseTally {
    pub case: u8,
    pub bound: DistanceBound,
    pub pairs: usize,
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub violations: usize,
}

impl CaseTally {
    fn record(&mut self, d: usize) {
        self.pairs += 1;
        self.min = Some(self.min.map_or(d, |m| m.min(d)));
        self.max = Some(self.max.map_or(d, |m| m.max(d)));
        if !self.bound.holds(d) {
            self.violations += 1;
        }
    }

    fn merge(&mut self, other: &CaseTally) {
        self.pairs += other.pairs;
        self.violations += other.violations;
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.max = match (self.max, other.max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
}

/// A pair of rows breaking its case bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub case: u8,
    pub rows: (usize, usize),
    pub distance: usize,
}

/// Result of classifying every row pair of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceCatalog {
    pub cases: Vec<CaseTally>,
    /// Pairs of identical jolly rows of one docking vertex, and how many of
    /// them are not at distance 0.
    pub parallel_jolly_pairs: usize,
    pub parallel_jolly_violations: usize,
    /// Up to 32 offending pairs.
    pub examples: Vec<PairViolation>,
}

impl DistanceCatalog {
    fn empty() -> Self {
        DistanceCatalog {
            cases: DISTANCE_CASES
                .iter()
                .map(|&(case, _, bound)| CaseTally {
                    case,
                    bound,
                    pairs: 0,
                    min: None,
                    max: None,
                    violations: 0,
                })
                .collect(),
            parallel_jolly_pairs: 0,
            parallel_jolly_violations: 0,
            examples: Vec::new(),
        }
    }

    fn merge(mut self, other: DistanceCatalog) -> Self {
        for (a, b) in self.cases.iter_mut().zip(&other.cases) {
            a.merge(b);
        }
        self.parallel_jolly_pairs += other.parallel_jolly_pairs;
        self.parallel_jolly_violations += other.parallel_jolly_violations;
        self.examples.extend(other.examples);
        self.examples.sort_by_key(|v| v.rows);
        self.examples.truncate(32);
        self
    }

    pub fn total_violations(&self) -> usize {
        self.cases.iter().map(|c| c.violations).sum::<usize>() + self.parallel_jolly_violations
    }

    /// Every case was exercised and none was violated.
    pub fn passed(&self) -> bool {
        self.total_violations() == 0 && self.cases.iter().all(|c| c.pairs > 0)
    }
}

/// Classifies every unordered row pair into the distance cases and checks each
/// case bound. Rows are scanned in parallel.
pub fn verify_distance_catalog(inst: &AbpInstance) -> Result<DistanceCatalog> {
    let rows = inst.instance.rows();
    if inst.provenance.len() != rows.len() {
        return Err(Error::MissingProvenance {
            expected: rows.len(),
            found: inst.provenance.len(),
        });
    }
    let catalog = (0..rows.len())
        .into_par_iter()
        .map(|a| {
            let mut local = DistanceCatalog::empty();
            for b in a + 1..rows.len() {
                let d = rows[a].hamming(&rows[b]).expect("equal widths");
                let (pa, pb) = (&inst.provenance[a], &inst.provenance[b]);
                let cases = distance_cases(pa, pb);
                if cases.is_empty() {
                    local.parallel_jolly_pairs += 1;
                    if d != 0 {
                        local.parallel_jolly_violations += 1;
                    }
                }
                for case in cases {
                    let tally = &mut local.cases[case as usize - 1];
                    tally.record(d);
                    if !tally.bound.holds(d) && local.examples.len() < 32 {
                        local.examples.push(PairViolation {
                            case,
                            rows: (a, b),
                            distance: d,
                        });
                    }
                }
            }
            local
        })
        .reduce(DistanceCatalog::empty, DistanceCatalog::merge);
    Ok(catalog)
}

/// What fills the cluster of a docking vertex in a type-b solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DockingChoice {
    EdgeGadget,
    Jolly,
}

/// Canonical clustering of the rows of one vertex gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetSolution {
    TypeA,
    /// Choices for docking vertices 1, 2, 3.
    TypeB([DockingChoice; 3]),
}

impl GadgetSolution {
    pub fn is_type_b(&self) -> bool {
        matches!(self, GadgetSolution::TypeB(_))
    }
}

/// Type-a clusters of gadget `i`: the three core edges at each of `c4`, `c5`,
/// `c7`, then each docking vertex's four jolly rows.
pub fn build_type_a(inst: &AbpInstance, i: usize) -> Result<Vec<Vec<usize>>> {
    inst.check_gadget(i)?;
    let mut clusters: Vec<Vec<usize>> = TYPE_A_CENTERS
        .iter()
        .map(|&c| {
            core_edges_at(c)
                .into_iter()
                .map(|e| inst.core_row(i, e))
                .collect()
        })
        .collect();
    for x in 1..=3 {
        clusters.push(inst.jolly_rows(i, x).to_vec());
    }
    Ok(clusters)
}

/// Type-b clusters of gadget `i`: the core edges at `c6`; for each docking
/// vertex its two core edges plus either its edge gadget or one jolly row;
/// then each docking vertex's remaining jolly rows.
pub fn build_type_b(
    inst: &AbpInstance,
    i: usize,
    choice: [DockingChoice; 3],
) -> Result<Vec<Vec<usize>>> {
    inst.check_gadget(i)?;
    if !choice.contains(&DockingChoice::EdgeGadget) {
        return Err(Error::NoEdgeGadgetAssigned { gadget: i });
    }
    let mut clusters = vec![core_edges_at(TYPE_B_CENTER)
        .into_iter()
        .map(|e| inst.core_row(i, e))
        .collect::<Vec<_>>()];
    let mut leftovers = Vec::with_capacity(3);
    for (slot, &c) in choice.iter().enumerate() {
        let x = slot as u8 + 1;
        let mut cluster: Vec<usize> = docking_core_edges(x)
            .iter()
            .map(|&e| inst.core_row(i, e))
            .collect();
        let jolly = inst.jolly_rows(i, x);
        match c {
            DockingChoice::EdgeGadget => {
                cluster.push(inst.edge_gadget_row(inst.gadgets.docked(i, x).edge));
                leftovers.push(jolly.to_vec());
            }
            DockingChoice::Jolly => {
                cluster.push(jolly[0]);
                leftovers.push(jolly[1..].to_vec());
            }
        }
        clusters.push(cluster);
    }
    clusters.extend(leftovers);
    Ok(clusters)
}

/// A canonical solution: one type-a or type-b solution per vertex gadget, with
/// every edge gadget inside exactly one type-b docking cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Canonical3 {
    pub gadgets: Vec<GadgetSolution>,
}

impl Canonical3 {
    /// Checks the structural constraints against `inst`.
    pub fn validate(&self, inst: &AbpInstance) -> Result<()> {
        if self.gadgets.len() != inst.n() {
            return Err(Error::NotCanonical(format!(
                "{} gadget solutions for {} vertex gadgets",
                self.gadgets.len(),
                inst.n()
            )));
        }
        for (i, sol) in self.gadgets.iter().enumerate() {
            if let GadgetSolution::TypeB(choice) = sol {
                if !choice.contains(&DockingChoice::EdgeGadget) {
                    return Err(Error::NoEdgeGadgetAssigned { gadget: i });
                }
            }
        }
        for eg in inst.gadgets.edge_gadgets() {
            let holds = |g: usize, slot: u8| match self.gadgets[g] {
                GadgetSolution::TypeB(c) => c[slot as usize - 1] == DockingChoice::EdgeGadget,
                GadgetSolution::TypeA => false,
            };
            match (holds(eg.i, eg.x), holds(eg.j, eg.y)) {
                (true, false) | (false, true) => {}
                (false, false) => {
                    return Err(Error::NotCanonical(format!(
                        "edge gadget ({}, {}) is in no type-b solution",
                        eg.i, eg.j
                    )))
                }
                (true, true) => {
                    return Err(Error::NotCanonical(format!(
                        "edge gadget ({}, {}) is claimed by both endpoints",
                        eg.i, eg.j
                    )))
                }
            }
        }
        Ok(())
    }

    /// The clustering this canonical solution describes.
    pub fn expand(&self, inst: &AbpInstance) -> Result<Clustering> {
        self.validate(inst)?;
        let mut clusters = Vec::new();
        for (i, sol) in self.gadgets.iter().enumerate() {
            match *sol {
                GadgetSolution::TypeA => clusters.extend(build_type_a(inst, i)?),
                GadgetSolution::TypeB(choice) => clusters.extend(build_type_b(inst, i, choice)?),
            }
        }
        Ok(Clustering::new(clusters))
    }

    /// Vertices whose gadget has a type-b solution.
    pub fn cover(&self) -> VertexCover {
        VertexCover::new(
            self.gadgets
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_type_b())
                .map(|(i, _)| i),
        )
    }

    /// Builds the solution from an owner per edge gadget (indexed by edge).
    fn from_owners(inst: &AbpInstance, owner: &[Option<usize>]) -> Self {
        let mut gadgets = vec![GadgetSolution::TypeA; inst.n()];
        for eg in inst.gadgets.edge_gadgets() {
            if let Some(g) = owner[eg.edge] {
                let slot = eg.slot_on(g).expect("owner is an endpoint");
                let choice = match &mut gadgets[g] {
                    GadgetSolution::TypeB(c) => c,
                    s => {
                        *s = GadgetSolution::TypeB([DockingChoice::Jolly; 3]);
                        match s {
                            GadgetSolution::TypeB(c) => c,
                            GadgetSolution::TypeA => unreachable!(),
                        }
                    }
                };
                choice[slot as usize - 1] = DockingChoice::EdgeGadget;
            }
        }
        Canonical3 { gadgets }
    }
}

/// Assigns every edge to one covered endpoint so that every cover vertex owns
/// at least one edge.
///
/// Edges go to their lower-indexed covered endpoint first. A cover vertex left
/// with nothing then takes an edge over along an augmenting path that ends at a
/// vertex owning two or more edges.
fn assign_edges_to_cover(g: &CubicGraph, cover: &VertexCover) -> Vec<usize> {
    let mut owner: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(u, v)| if cover.contains(u) { u } else { v })
        .collect();
    let mut owned = vec![0usize; g.n()];
    for &o in &owner {
        owned[o] += 1;
    }
    for &v in cover.vertices() {
        if owned[v] > 0 {
            continue;
        }
        // BFS over vertices; `via[w]` is the edge through which w was reached.
        let mut via: Vec<Option<usize>> = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        seen[v] = true;
        let mut queue = std::collections::VecDeque::from([v]);
        let mut end = None;
        'bfs: while let Some(w) = queue.pop_front() {
            for u in g.neighbors(w) {
                let e = g.edge_index(w, u).unwrap();
                let o = owner[e];
                if o == w || seen[o] {
                    continue;
                }
                seen[o] = true;
                via[o] = Some(e);
                if owned[o] >= 2 {
                    end = Some(o);
                    break 'bfs;
                }
                queue.push_back(o);
            }
        }
        let mut cur = end.expect("every component has at least as many edges as cover vertices");
        owned[cur] -= 1;
        while let Some(e) = via[cur] {
            let (a, b) = g.edges()[e];
            let taker = if a == cur { b } else { a };
            owner[e] = taker;
            cur = taker;
        }
        owned[v] += 1;
    }
    owner
}

/// Canonical solution of a vertex cover: type b on the cover, type a elsewhere.
pub fn canonical_from_cover(inst: &AbpInstance, cover: &VertexCover) -> Result<Canonical3> {
    cover.check(&inst.graph)?;
    let owner = assign_edges_to_cover(&inst.graph, cover);
    let owner: Vec<Option<usize>> = owner.into_iter().map(Some).collect();
    let canonical = Canonical3::from_owners(inst, &owner);
    canonical.validate(inst)?;
    Ok(canonical)
}

/// Feasible canonical clustering of cost `99p + 81(n - p) + 12m` for a cover
/// of size `p`.
pub fn vc_to_solution_3abp(inst: &AbpInstance, cover: &VertexCover) -> Result<Clustering> {
    canonical_from_cover(inst, cover)?.expand(inst)
}

/// Reads the canonical structure back out of a clustering.
pub fn classify_3abp(inst: &AbpInstance, p: &Clustering) -> Result<Canonical3> {
    let rows = inst.instance.len();
    p.validate(rows)?;
    let owner = p.assignment(rows);
    let mut claimed = vec![false; p.len()];
    let mut gadgets = Vec::with_capacity(inst.n());

    let exact = |members: &[usize]| -> Option<usize> {
        let c = owner[members[0]];
        (p.clusters()[c].len() == members.len() && members.iter().all(|&r| owner[r] == c))
            .then_some(c)
    };

    for i in 0..inst.n() {
        let mut type_a = Vec::new();
        for &center in &TYPE_A_CENTERS {
            let rows: Vec<usize> = core_edges_at(center)
                .into_iter()
                .map(|e| inst.core_row(i, e))
                .collect();
            type_a.push(exact(&rows));
        }
        for x in 1..=3 {
            type_a.push(exact(&inst.jolly_rows(i, x)));
        }
        if type_a.iter().all(Option::is_some) {
            for c in type_a.into_iter().flatten() {
                claimed[c] = true;
            }
            gadgets.push(GadgetSolution::TypeA);
            continue;
        }

        let fail = |c: usize| {
            Error::NotCanonical(format!(
                "cluster {c} breaks the type a / type b shape of vertex gadget {i}"
            ))
        };
        let center_rows: Vec<usize> = core_edges_at(TYPE_B_CENTER)
            .into_iter()
            .map(|e| inst.core_row(i, e))
            .collect();
        let mut used = vec![exact(&center_rows).ok_or_else(|| fail(owner[center_rows[0]]))?];
        let mut choice = [DockingChoice::Jolly; 3];
        for x in 1..=3u8 {
            let core: Vec<usize> = docking_core_edges(x)
                .iter()
                .map(|&e| inst.core_row(i, e))
                .collect();
            let c = owner[core[0]];
            let cluster = &p.clusters()[c];
            if owner[core[1]] != c || cluster.len() != 3 {
                return Err(fail(c));
            }
            let extra = *cluster.iter().find(|r| !core.contains(r)).unwrap();
            let jolly = inst.jolly_rows(i, x);
            let eg_row = inst.edge_gadget_row(inst.gadgets.docked(i, x).edge);
            let rest: Vec<usize> = if extra == eg_row {
                choice[x as usize - 1] = DockingChoice::EdgeGadget;
                jolly.to_vec()
            } else if jolly.contains(&extra) {
                jolly.iter().copied().filter(|&r| r != extra).collect()
            } else {
                return Err(fail(c));
            };
            used.push(c);
            used.push(exact(&rest).ok_or_else(|| fail(owner[rest[0]]))?);
        }
        if !choice.contains(&DockingChoice::EdgeGadget) {
            return Err(Error::NotCanonical(format!(
                "vertex gadget {i} has a type-b shape without any edge gadget"
            )));
        }
        for c in used {
            claimed[c] = true;
        }
        gadgets.push(GadgetSolution::TypeB(choice));
    }
    if let Some(c) = claimed.iter().position(|&b| !b) {
        return Err(Error::NotCanonical(format!(
            "cluster {c} belongs to no type a or type b solution"
        )));
    }
    let canonical = Canonical3 { gadgets };
    canonical.validate(inst)?;
    Ok(canonical)
}

/// Whether `p` is a canonical solution.
pub fn is_canonical_3abp(inst: &AbpInstance, p: &Clustering) -> bool {
    classify_3abp(inst, p).is_ok()
}

/// The vertices whose gadgets carry a type-b solution in a canonical `p`.
pub fn solution_to_vc_3abp(inst: &AbpInstance, p: &Clustering) -> Result<VertexCover> {
    let cover = classify_3abp(inst, p)?.cover();
    cover.check(&inst.graph)?;
    Ok(cover)
}

/// Virtual cost of every row under `p`.
///
/// A non-jolly row carries its cluster's cost divided by the number of
/// non-jolly rows in the cluster; a jolly row carries 0. A cluster made only of
/// jolly rows spreads its cost evenly over them, so the virtual costs of any
/// cluster always add up to its cost (such a cluster costs 0 whenever its rows
/// are parallel copies).
pub fn virtual_costs(inst: &AbpInstance, p: &Clustering) -> Result<Vec<Ratio<u64>>> {
    let rows = inst.instance.len();
    if inst.provenance.len() != rows {
        return Err(Error::MissingProvenance {
            expected: rows,
            found: inst.provenance.len(),
        });
    }
    p.validate(rows)?;
    let mut out = vec![Ratio::from_integer(0); rows];
    for cluster in p.clusters() {
        let cost = inst.instance.cluster_cost(cluster)?;
        let carriers = cluster
            .iter()
            .filter(|&&r| !inst.provenance[r].is_jolly())
            .count();
        if carriers == 0 {
            for &r in cluster {
                out[r] = Ratio::new(cost, cluster.len() as u64);
            }
        } else {
            for &r in cluster {
                if !inst.provenance[r].is_jolly() {
                    out[r] = Ratio::new(cost, carriers as u64);
                }
            }
        }
    }
    Ok(out)
}

/// Virtual cost of a single row under `p`.
pub fn virtual_cost(inst: &AbpInstance, p: &Clustering, row: usize) -> Result<Ratio<u64>> {
    if row >= inst.instance.len() {
        return Err(Error::RowOutOfRange {
            index: row,
            rows: inst.instance.len(),
        });
    }
    Ok(virtual_costs(inst, p)?[row])
}

/// Smallest set of gadgets touching every edge gadget in `edges`; ties go to the
/// lexicographically smallest sorted gadget list.
fn min_gadget_cover(inst: &AbpInstance, edges: &[usize]) -> Vec<usize> {
    let egs = inst.gadgets.edge_gadgets();
    let candidates: Vec<usize> = edges
        .iter()
        .flat_map(|&e| [egs[e].i, egs[e].j])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..1 << candidates.len() {
        let set: Vec<usize> = (0..candidates.len())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| candidates[b])
            .collect();
        let covers = edges
            .iter()
            .all(|&e| set.contains(&egs[e].i) || set.contains(&egs[e].j));
        let better = match &best {
            None => true,
            Some(b) => (set.len(), &set) < (b.len(), b),
        };
        if covers && better {
            best = Some(set);
        }
    }
    best.unwrap_or_default()
}

/// Rewrites a feasible solution as a canonical one of no greater cost.
///
/// Cluster sizes are first brought into `[3, 5]`. Then, while some cluster
/// holds an unmarked edge gadget (lowest cluster index first): take its
/// unmarked edge gadgets `U`, a minimum set `V` of vertex gadgets touching all
/// of `U`, and every unmarked edge gadget `E'` touching `V`; give the gadgets of
/// `V` type-b solutions holding `E'` and mark `V` and `E'`. A cluster made of
/// one edge gadget and rows of one of its endpoint gadgets selects that gadget.
/// Unmarked gadgets end up type a.
pub fn canonicalize_3abp(inst: &AbpInstance, s1: &Clustering) -> Result<Clustering> {
    canonicalize_3abp_structure(inst, s1)?.expand(inst)
}

/// [`canonicalize_3abp`] returning the canonical structure instead of rows.
pub fn canonicalize_3abp_structure(inst: &AbpInstance, s1: &Clustering) -> Result<Canonical3> {
    let s = inst.instance.normalize_cluster_sizes(s1)?;
    let egs = inst.gadgets.edge_gadgets();
    let mut edge_marked = vec![false; inst.m()];
    let mut gadget_marked = vec![false; inst.n()];
    let mut owner: Vec<Option<usize>> = vec![None; inst.m()];

    let cluster_edges: Vec<Vec<usize>> = s
        .clusters()
        .iter()
        .map(|c| c.iter().filter_map(|&r| inst.edge_of_row(r)).collect())
        .collect();

    while let Some(c) = (0..s.len()).find(|&c| cluster_edges[c].iter().any(|&e| !edge_marked[e])) {
        let unmarked: Vec<usize> = cluster_edges[c]
            .iter()
            .copied()
            .filter(|&e| !edge_marked[e])
            .collect();

        let single_side = match cluster_edges[c].as_slice() {
            [e] => {
                let gadget_of = |r: usize| match inst.provenance[r] {
                    Provenance3::CoreEdge { gadget, .. }
                    | Provenance3::JollyEdge { gadget, .. } => Some(gadget),
                    Provenance3::EdgeGadget { .. } => None,
                };
                let sides: BTreeSet<Option<usize>> = s.clusters()[c]
                    .iter()
                    .filter(|&&r| inst.edge_of_row(r).is_none())
                    .map(|&r| gadget_of(r))
                    .collect();
                match sides.into_iter().collect::<Vec<_>>().as_slice() {
                    [Some(g)] if egs[*e].slot_on(*g).is_some() => Some(vec![*g]),
                    _ => None,
                }
            }
            _ => None,
        };
        let chosen = single_side.unwrap_or_else(|| min_gadget_cover(inst, &unmarked));

        for e in 0..inst.m() {
            if edge_marked[e] {
                continue;
            }
            let (i, j) = (egs[e].i, egs[e].j);
            let taker = if chosen.contains(&i) {
                Some(i)
            } else if chosen.contains(&j) {
                Some(j)
            } else {
                None
            };
            if let Some(g) = taker {
                owner[e] = Some(g);
                edge_marked[e] = true;
            }
        }
        for &g in &chosen {
            debug_assert!(
                !gadget_marked[g],
                "gadgets with unmarked edges are unmarked"
            );
            gadget_marked[g] = true;
        }
    }
    let canonical = Canonical3::from_owners(inst, &owner);
    canonical.validate(inst)?;
    Ok(canonical)
}
