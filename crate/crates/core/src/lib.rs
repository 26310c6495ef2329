//! Stratified (jittered) and simple random sampling on the unit cube, with
//! exact and cover-based star discrepancy engines.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: the `m^d` grid partition, anchored test boxes, cell/box
//!   intersection volumes and boundary-cell counts.
//! - [`samplers`]: a pinned pseudo-random stream and the two samplers
//!   (simple random and jittered).
//! - [`discrepancy`]: local discrepancy, the exact star discrepancy and
//!   δ-cover discretisation.
//! - [`analysis`]: closed-form count variances and the Bernstein/union
//!   tail bounds built on them.
//! - [`experiment`]: replicated estimation of expected star discrepancy and
//!   a Welch comparison of two samplers.
//! - [`io`]: CSV and JSON interchange used by the command-line tool.

pub mod analysis;
pub mod discrepancy;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod samplers;
pub mod stats;

pub use analysis::VarianceComparison;
pub use discrepancy::{DeltaCover, DiscrepancyResult, Side};
pub use error::{Error, Result};
pub use experiment::{ExperimentResult, Method, RunConfig, SamplerKind};
pub use geometry::{AnchoredBox, BoxDecomposition, GridPartition};
pub use samplers::{PointSet, Provenance, RandomStream};
