//! Statistics, samplers and a Monte Carlo harness for detecting a planted dense
//! subgraph in an Erdős–Rényi random graph.

pub mod detectors;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kernels;
pub mod models;

pub use detectors::{Detector, DetectorId, DetectorResult};
pub use error::{Error, Result};
pub use graph::{Graph, NodeSubset};
pub use models::{ModelSpec, SeededStream, Variant};
