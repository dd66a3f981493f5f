//! Hardness reductions for k-anonymity under the entry-suppression cost model.
//!
//! Two reductions from minimum vertex cover on cubic graphs are built here:
//! [`abp`] produces binary tables for `k = 3`, [`ap8`] produces tables with
//! eight columns for `k = 4`. Each comes with canonical solutions tied to
//! vertex covers, converters in both directions and a canonicalizer that maps
//! any feasible solution to a canonical one of no greater cost.

pub mod abp;
pub mod ap8;
pub mod error;
pub mod graphs;
pub mod io;
pub mod model;
pub mod random;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use graphs::{Builtin, CubicGraph, VertexCover};
pub use model::{hamming, Clustering, Instance, Row, Symbol};
pub use report::VerificationReport;
pub use solver::{exact_kap, greedy_kap, SolveResult};
