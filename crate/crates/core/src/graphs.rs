//! Cubic graphs, the built-in test graphs, and vertex cover solvers.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A simple undirected 3-regular graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically, so the
/// edge numbering does not depend on input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<[usize; 3]>,
}

impl CubicGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> [usize; 3] {
        self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    /// Index of edge `{u, v}` in [`CubicGraph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }
}

/// Checks that `edges` describe a simple 3-regular graph on `0..n`.
pub fn validate_cubic(n: usize, edges: &[(usize, usize)]) -> Result<CubicGraph> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("graph has no vertices".into()));
    }
    let mut normalized = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::IndexOutOfRange(format!(
                "edge ({u}, {v}) names a vertex outside 0..{n}"
            )));
        }
        if u == v {
            return Err(Error::NotSimple(format!("loop at vertex {u}")));
        }
        normalized.push((u.min(v), u.max(v)));
    }
    normalized.sort_unstable();
    if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::NotSimple(format!(
            "edge ({}, {}) appears more than once",
            w[0].0, w[0].1
        )));
    }
    let mut neighbors = vec![Vec::with_capacity(3); n];
    for &(u, v) in &normalized {
        neighbors[u].push(v);
        neighbors[v].push(u);
    }
    if let Some((vertex, adj)) = neighbors.iter().enumerate().find(|(_, a)| a.len() != 3) {
        return Err(Error::NotCubic {
            vertex,
            degree: adj.len(),
        });
    }
    let adjacency = neighbors
        .into_iter()
        .map(|mut a| {
            a.sort_unstable();
            [a[0], a[1], a[2]]
        })
        .collect();
    Ok(CubicGraph {
        n,
        edges: normalized,
        adjacency,
    })
}

/// The small graphs used as desk-scale instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    K4,
    K33,
    Petersen,
    Q3,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::K4, Builtin::K33, Builtin::Petersen, Builtin::Q3];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::K4 => "k4",
            Builtin::K33 => "k33",
            Builtin::Petersen => "petersen",
            Builtin::Q3 => "q3",
        }
    }

    pub fn graph(self) -> CubicGraph {
        let edges: Vec<(usize, usize)> = match self {
            Builtin::K4 => (0..4)
                .flat_map(|u| (u + 1..4).map(move |v| (u, v)))
                .collect(),
            Builtin::K33 => (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect(),
            Builtin::Petersen => (0..5)
                .flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)])
                .collect(),
            Builtin::Q3 => (0..8usize)
                .flat_map(|u| {
                    [1, 2, 4]
                        .into_iter()
                        .map(move |bit| (u, u ^ bit))
                        .filter(|&(u, v)| u < v)
                })
                .collect(),
        };
        let n = match self {
            Builtin::K4 => 4,
            Builtin::K33 => 6,
            Builtin::Petersen => 10,
            Builtin::Q3 => 8,
        };
        validate_cubic(n, &edges).expect("built-in graphs are cubic")
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown built-in graph {s:?}")))
    }
}

/// A uniformly paired random cubic graph on `n` vertices (`n` even, `n >= 4`),
/// drawn with the configuration model and rejection of loops and multi-edges.
pub fn random_cubic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CubicGraph> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::IndexOutOfRange(format!(
            "a cubic graph needs an even vertex count of at least 4, got {n}"
        )));
    }
    let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
    loop {
        points.shuffle(rng);
        let edges: Vec<(usize, usize)> = points.chunks(2).map(|p| (p[0], p[1])).collect();
        if let Ok(g) = validate_cubic(n, &edges) {
            return Ok(g);
        }
    }
}

/// Parses the text graph format: a `p <n> <m>` line followed by `m` lines
/// `e <u> <v>` with 1-based vertices. Blank lines and `c` comments are skipped.
pub fn parse_graph(text: &str) -> Result<CubicGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad("expected an integer"));
        match fields.as_slice() {
            [] | ["c", ..] => {}
            ["p", rest @ ..] => {
                if header.is_some() {
                    return Err(bad("duplicate header"));
                }
                let nums: Vec<&str> = rest
                    .iter()
                    .copied()
                    .skip_while(|t| t.parse::<usize>().is_err())
                    .collect();
                match nums.as_slice() {
                    [n, m] => header = Some((num(n)?, num(m)?)),
                    _ => return Err(bad("header must be `p <n> <m>`")),
                }
            }
            ["e", u, v] => {
                if header.is_none() {
                    return Err(bad("edge before header"));
                }
                let (u, v) = (num(u)?, num(v)?);
                if u == 0 || v == 0 {
                    return Err(bad("vertices are numbered from 1"));
                }
                edges.push((u - 1, v - 1));
            }
            _ => return Err(bad("unrecognised line")),
        }
    }
    let (n, m) = header.ok_or_else(|| Error::Parse("missing `p <n> <m>` header".into()))?;
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    validate_cubic(n, &edges)
}

/// Serializes a graph in the format read by [`parse_graph`].
pub fn write_graph(g: &CubicGraph) -> String {
    let mut out = format!("p {} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

/// A set of vertices (0-based) meant to touch every edge.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct VertexCover {
    vertices: BTreeSet<usize>,
}

impl VertexCover {
    pub fn new<I: IntoIterator<Item = usize>>(vertices: I) -> Self {
        VertexCover {
            vertices: vertices.into_iter().collect(),
        }
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// First edge of `g` with neither endpoint in the set.
    pub fn uncovered_edge(&self, g: &CubicGraph) -> Option<(usize, usize)> {
        g.edges()
            .iter()
            .copied()
            .find(|&(u, v)| !self.contains(u) && !self.contains(v))
    }

    pub fn is_cover(&self, g: &CubicGraph) -> bool {
        self.vertices.iter().all(|&v| v < g.n()) && self.uncovered_edge(g).is_none()
    }

    /// Errors with the first uncovered edge, or an out-of-range vertex.
    pub fn check(&self, g: &CubicGraph) -> Result<()> {
        if let Some(&v) = self.vertices.iter().find(|&&v| v >= g.n()) {
            return Err(Error::IndexOutOfRange(format!(
                "cover names vertex {v} but the graph has {} vertices",
                g.n()
            )));
        }
        match self.uncovered_edge(g) {
            Some((u, v)) => Err(Error::NotACover(u, v)),
            None => Ok(()),
        }
    }
}

/// Maximal-matching 2-approximation: both endpoints of every edge found with
/// neither endpoint taken yet.
pub fn greedy_vertex_cover(g: &CubicGraph) -> VertexCover {
    let mut taken = vec![false; g.n()];
    for &(u, v) in g.edges() {
        if !taken[u] && !taken[v] {
            taken[u] = true;
            taken[v] = true;
        }
    }
    VertexCover::new((0..g.n()).filter(|&v| taken[v]))
}

/// Minimum vertex cover by branch and bound.
///
/// Each node branches on the uncovered vertex of highest residual degree:
/// either it joins the cover, or all of its uncovered neighbours do. A greedy
/// maximal matching on the uncovered edges bounds the remaining cover size.
pub fn exact_vertex_cover(g: &CubicGraph) -> VertexCover {
    let mut search = CoverSearch {
        g,
        in_cover: vec![false; g.n()],
        chosen: Vec::new(),
        best: greedy_vertex_cover(g).vertices.into_iter().collect(),
    };
    search.run();
    VertexCover::new(search.best)
}

struct CoverSearch<'a> {
    g: &'a CubicGraph,
    in_cover: Vec<bool>,
    chosen: Vec<usize>,
    best: Vec<usize>,
}

impl CoverSearch<'_> {
    fn residual_degree(&self, v: usize) -> usize {
        self.g
            .neighbors(v)
            .iter()
            .filter(|&&w| !self.in_cover[w])
            .count()
    }

    fn matching_bound(&self, uncovered: &[(usize, usize)]) -> usize {
        let mut used = vec![false; self.g.n()];
        let mut size = 0;
        for &(u, v) in uncovered {
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                size += 1;
            }
        }
        size
    }

    fn take(&mut self, v: usize) {
        self.in_cover[v] = true;
        self.chosen.push(v);
    }

    fn undo_to(&mut self, depth: usize) {
        while self.chosen.len() > depth {
            let v = self.chosen.pop().unwrap();
            self.in_cover[v] = false;
        }
    }

    fn run(&mut self) {
        let uncovered: Vec<(usize, usize)> = self
            .g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| !self.in_cover[u] && !self.in_cover[v])
            .collect();
        if uncovered.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + self.matching_bound(&uncovered) >= self.best.len() {
            return;
        }
        let pivot = uncovered
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .max_by_key(|&v| (self.residual_degree(v), std::cmp::Reverse(v)))
            .expect("at least one uncovered edge");

        let depth = self.chosen.len();
        self.take(pivot);
        self.run();
        self.undo_to(depth);

        for w in self.g.neighbors(pivot) {
            if !self.in_cover[w] {
                self.take(w);
            }
        }
        self.run();
        self.undo_to(depth);
    }
}
