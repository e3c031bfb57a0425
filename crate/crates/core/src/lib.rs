//! Randomized low-diameter decompositions (LDDs) of planar graphs with
//! individual-fairness guarantees.
//!
//! The crate provides the classic three-phase KPR decomposition and four
//! variants that trade compression or connectivity for lower bounds on the
//! probability that a vertex pair is separated, adversarial graph families
//! on which KPR never separates a chosen pair, an LDD-to-ℓ1 embedding, and a
//! Monte Carlo harness for checking separation, diameter and cluster-count
//! bounds.

pub mod counterexample;
pub mod decomp;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod io;
pub mod rng;
pub mod stats;

pub use decomp::{decompose, Algorithm, Decomposition, LddConfig, RootPolicy};
pub use error::{Error, Result};
pub use graph::{Graph, GraphKind, VertexId, VertexSet};
