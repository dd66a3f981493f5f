use thiserror::Error;

/// Errors raised by the cost model, graph layer, reductions and solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rows have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("rows must have at least one column")]
    EmptyRow,

    #[error("cluster is empty")]
    EmptyCluster,

    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cluster {cluster} has {size} rows, fewer than k = {k}")]
    Infeasible {
        cluster: usize,
        size: usize,
        k: usize,
    },

    #[error("instance has {rows} rows, fewer than k = {k}")]
    TooFewRows { rows: usize, k: usize },

    #[error("k must be positive")]
    ZeroK,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("graph is not cubic: vertex {vertex} has degree {degree}")]
    NotCubic { vertex: usize, degree: usize },

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("vertex gadget {gadget} has no docking vertex assigned an edge gadget")]
    NoEdgeGadgetAssigned { gadget: usize },

    #[error("not a vertex cover: edge ({0}, {1}) is uncovered")]
    NotACover(usize, usize),

    #[error("solution is not canonical: {0}")]
    NotCanonical(String),

    #[error("edge row ({vertex}, {neighbor}) already consumed by an adjacent black set")]
    EdgeRowConflict { vertex: usize, neighbor: usize },

    #[error("instance has {rows} rows, above the exact-search limit of {limit}")]
    TooLarge { rows: usize, limit: usize },

    #[error("provenance covers {found} rows but the instance has {expected}")]
    MissingProvenance { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
