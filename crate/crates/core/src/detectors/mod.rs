//! Test statistics for planted dense subgraph detection.
//!
//! Every statistic returns a [`DetectorResult`]. Exhaustive and
//! branch-and-bound searches report the lexicographically smallest optimal
//! witness, so results are independent of evaluation order.

mod clique;
mod degree;
mod densest;
mod flow;
mod scan;
mod spectral;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use clique::{clique_number, clique_number_with_budget, DEFAULT_CLIQUE_NODE_BUDGET};
pub use degree::{degree_variance_parts, degree_variance_stat, max_degree_stat, total_degree_stat, DegreeVariance};
pub use densest::{densest_at_least, densest_subgraph, density, DensestMode};
pub use scan::{glr_objective, glr_stat, glr_stat_with_budget, scan_all_sizes, scan_stat, scan_stat_with_budget, ScanMode, DEFAULT_SCAN_BUDGET};
pub use spectral::{
    lambda_max_upper, relaxed_scan_stat, sdp_dual_bound, sparse_eig_lower, sym_lambda_max, z_grid, SparseEigLower,
    SquaredAdjacency, ENUMERATION_MAX_NODES, Z_GRID_CAP,
};

use crate::error::Result;
use crate::graph::{Graph, NodeSubset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorId {
    TotalDegree,
    MaxDegree,
    DegreeVariance,
    Scan,
    Glr,
    CliqueNumber,
    DensestSubgraph,
    DensestAtLeast,
    RelaxedScan,
}

impl DetectorId {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectorId::TotalDegree => "total_degree",
            DetectorId::MaxDegree => "max_degree",
            DetectorId::DegreeVariance => "degree_variance",
            DetectorId::Scan => "scan",
            DetectorId::Glr => "glr",
            DetectorId::CliqueNumber => "clique_number",
            DetectorId::DensestSubgraph => "densest_subgraph",
            DetectorId::DensestAtLeast => "densest_at_least",
            DetectorId::RelaxedScan => "relaxed_scan",
        }
    }
}

/// Which side of the true optimum an inexact value lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundDirection {
    /// The value never exceeds the optimum (greedy and peeling heuristics).
    Lower,
    /// The value is never below the relaxed optimum (dual certificates).
    Upper,
}

/// A statistic value with an optional witness subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorResult {
    pub detector_id: DetectorId,
    #[serde(serialize_with = "serialize_value", deserialize_with = "deserialize_value")]
    pub value: f64,
    pub witness: Option<NodeSubset>,
    pub exact: bool,
    /// Certified lower end of a sandwich interval (relaxed scan only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
}

impl DetectorResult {
    pub(crate) fn exact(detector_id: DetectorId, value: f64, witness: Option<NodeSubset>) -> Self {
        DetectorResult { detector_id, value, witness, exact: true, lower_bound: None }
    }

    pub(crate) fn inexact(detector_id: DetectorId, value: f64, witness: Option<NodeSubset>) -> Self {
        DetectorResult { detector_id, value, witness, exact: false, lower_bound: None }
    }

    pub fn bound_direction(&self) -> Option<BoundDirection> {
        if self.exact {
            return None;
        }
        Some(match self.detector_id {
            DetectorId::RelaxedScan => BoundDirection::Upper,
            _ => BoundDirection::Lower,
        })
    }
}

/// Integral values are written as JSON integers.
fn serialize_value<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        s.serialize_i64(*v as i64)
    } else {
        s.serialize_f64(*v)
    }
}

fn deserialize_value<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    f64::deserialize(d)
}

/// A fully parameterised statistic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "detector", rename_all = "snake_case", deny_unknown_fields)]
pub enum Detector {
    TotalDegree,
    MaxDegree,
    DegreeVariance,
    Scan { n: usize, mode: ScanMode },
    Glr { n: usize },
    CliqueNumber,
    DensestSubgraph { mode: DensestMode },
    DensestAtLeast { n: usize },
    RelaxedScan { n: usize },
}

impl Detector {
    pub fn id(&self) -> DetectorId {
        match self {
            Detector::TotalDegree => DetectorId::TotalDegree,
            Detector::MaxDegree => DetectorId::MaxDegree,
            Detector::DegreeVariance => DetectorId::DegreeVariance,
            Detector::Scan { .. } => DetectorId::Scan,
            Detector::Glr { .. } => DetectorId::Glr,
            Detector::CliqueNumber => DetectorId::CliqueNumber,
            Detector::DensestSubgraph { .. } => DetectorId::DensestSubgraph,
            Detector::DensestAtLeast { .. } => DetectorId::DensestAtLeast,
            Detector::RelaxedScan { .. } => DetectorId::RelaxedScan,
        }
    }

    /// Short stable label, e.g. `scan[n=5,branch_bound]`.
    pub fn label(&self) -> String {
        let id = self.id().as_str();
        match self {
            Detector::Scan { n, mode } => format!("{id}[n={n},{}]", mode.as_str()),
            Detector::Glr { n } | Detector::DensestAtLeast { n } | Detector::RelaxedScan { n } => format!("{id}[n={n}]"),
            Detector::DensestSubgraph { mode } => format!("{id}[{}]", mode.as_str()),
            _ => id.to_string(),
        }
    }

    pub fn evaluate(&self, g: &Graph) -> Result<DetectorResult> {
        match *self {
            Detector::TotalDegree => Ok(total_degree_stat(g)),
            Detector::MaxDegree => Ok(max_degree_stat(g)),
            Detector::DegreeVariance => degree_variance_stat(g),
            Detector::Scan { n, mode } => scan_stat(g, n, mode),
            Detector::Glr { n } => glr_stat(g, n),
            Detector::CliqueNumber => clique_number(g),
            Detector::DensestSubgraph { mode } => densest_subgraph(g, mode),
            Detector::DensestAtLeast { n } => densest_at_least(g, n),
            Detector::RelaxedScan { n } => relaxed_scan_stat(g, n),
        }
    }
}
