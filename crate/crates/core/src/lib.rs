//! Dynamic last-passage percolation on the cube `[0, n]^d`.
//!
//! Vertex weights are refreshed independently over a time parameter
//! `t ∈ [0, 1]`; this crate computes passage times, geodesic sets, threshold
//! weights and co-influences, and estimates how passage times and geodesics
//! decorrelate as `t` grows.

pub mod distributions;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod lattice;
pub mod lpp;
pub mod oracle;
mod quad;
pub mod stats;
pub mod streams;

pub use distributions::WeightDistribution;
pub use dynamics::DynamicCoupling;
pub use error::{Error, Result};
pub use lattice::Grid;
pub use lpp::{Configuration, PassageResult, TieRule};
