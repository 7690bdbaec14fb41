//! Densest subgraph `max_S |E_S| / |S|`, with edges counted once.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::detectors::flow::FlowNetwork;
use crate::detectors::{DetectorId, DetectorResult};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSubset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensestMode {
    /// Parametric min-cut search; exact.
    ExactFlow,
    /// Minimum-degree peeling; at least half the optimum.
    Peel,
}

impl DensestMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DensestMode::ExactFlow => "exact_flow",
            DensestMode::Peel => "peel",
        }
    }
}

/// `h(S) = |E_S| / |S|`; zero for the empty set.
pub fn density(g: &Graph, subset: &NodeSubset) -> Result<f64> {
    let e = g.subgraph_edges(subset)?;
    Ok(if subset.is_empty() { 0.0 } else { e as f64 / subset.len() as f64 })
}

pub fn densest_subgraph(g: &Graph, mode: DensestMode) -> Result<DetectorResult> {
    if g.total_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(match mode {
        DensestMode::ExactFlow => {
            let (edges, nodes) = exact_flow(g);
            let value = edges as f64 / nodes.len() as f64;
            DetectorResult::exact(DetectorId::DensestSubgraph, value, Some(NodeSubset::from_sorted_unchecked(nodes)))
        }
        DensestMode::Peel => {
            let (edges, nodes) = peel(g, 1);
            let value = edges as f64 / nodes.len() as f64;
            DetectorResult::inexact(DetectorId::DensestSubgraph, value, Some(NodeSubset::from_sorted_unchecked(nodes)))
        }
    })
}

/// Peeling restricted to sets of size at least `n`: a lower bound on `max_{|S| >= n} h(S)`.
pub fn densest_at_least(g: &Graph, n: usize) -> Result<DetectorResult> {
    if n < 1 || n > g.num_nodes() {
        return Err(Error::InvalidSize { size: n, min: 1, max: g.num_nodes() });
    }
    let (edges, nodes) = peel(g, n);
    let value = edges as f64 / nodes.len() as f64;
    let witness = Some(NodeSubset::from_sorted_unchecked(nodes));
    Ok(if n == g.num_nodes() {
        DetectorResult::exact(DetectorId::DensestAtLeast, value, witness)
    } else {
        DetectorResult::inexact(DetectorId::DensestAtLeast, value, witness)
    })
}

/// Remove a minimum-degree node (smallest index on ties) until `min_size` nodes
/// remain, keeping the densest intermediate set (the larger one on ties).
fn peel(g: &Graph, min_size: usize) -> (usize, Vec<usize>) {
    let num = g.num_nodes();
    let mut deg = g.degrees();
    let mut alive = vec![true; num];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..num).map(|v| Reverse((deg[v], v))).collect();
    let mut edges = g.total_edges();
    let mut left = num;
    let mut order = Vec::with_capacity(num);
    // best density as the fraction best_e / best_k
    let (mut best_e, mut best_k, mut best_removed) = (edges, num, 0usize);
    while left > min_size {
        let Reverse((d, v)) = heap.pop().expect("nodes remain");
        if !alive[v] || d != deg[v] {
            continue;
        }
        alive[v] = false;
        order.push(v);
        left -= 1;
        edges -= d;
        for u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                heap.push(Reverse((deg[u], u)));
            }
        }
        if (edges as u128) * (best_k as u128) > (best_e as u128) * (left as u128) {
            best_e = edges;
            best_k = left;
            best_removed = order.len();
        }
    }
    let mut removed = vec![false; num];
    for &v in &order[..best_removed] {
        removed[v] = true;
    }
    (best_e, (0..num).filter(|&v| !removed[v]).collect())
}

/// Exact densest subgraph. Returns the edge count and the largest maximiser.
fn exact_flow(g: &Graph) -> (usize, Vec<usize>) {
    let num = g.num_nodes();
    let m = g.total_edges() as i64;
    let nn = num as i64;
    let pairs = (nn * (nn - 1)).max(2);
    // densities are num/scale; scale >= 4 N (N - 1) keeps midpoints distinct to the end
    let scale: i64 = (4 * pairs as u64).next_power_of_two() as i64;
    assert!((m as i128) * (nn as i128) * (scale as i128) * 4 < i64::MAX as i128, "graph too large for the flow search");

    let degrees = g.degrees();
    // a single edge has density 1/2 > 0
    let mut lo: i64 = 0;
    let mut hi: i64 = (nn - 1) * scale / 2 + scale;
    let mut best_set: Vec<usize> = {
        let (u, v) = g.edges().next().expect("nonempty");
        vec![u, v]
    };
    while (hi - lo) as i128 * pairs as i128 >= scale as i128 {
        let mid = lo + (hi - lo) / 2;
        let (flow, net) = density_network(g, &degrees, m * scale, 2 * mid, scale);
        if flow < m * nn * scale {
            let side = net.reachable_from(num);
            best_set = (0..num).filter(|&v| side[v]).collect();
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = best_set.len() as i64;
    let e = g.subgraph_edges_unchecked(&best_set) as i64;
    // every maximiser has zero cut excess at g = e/k; the union of them is the
    // complement of the nodes that still reach the sink
    let (flow, net) = density_network(g, &degrees, m * k, 2 * e, k);
    debug_assert_eq!(flow, m * nn * k);
    let sink_side = net.reaching(num + 1);
    let maximal: Vec<usize> = (0..num).filter(|&v| !sink_side[v]).collect();
    if !maximal.is_empty() && g.subgraph_edges_unchecked(&maximal) as i64 * k == e * maximal.len() as i64 {
        return (g.subgraph_edges_unchecked(&maximal), maximal);
    }
    (e as usize, best_set)
}

/// Network whose minimum cut is `m N c + 2 min_S (c g |S| - c |E_S|)` for density `g`
/// given as `two_g_scaled / (2 c)`. Returns the max flow and the residual network.
fn density_network(g: &Graph, degrees: &[usize], source_cap: i64, two_g_scaled: i64, c: i64) -> (i64, FlowNetwork) {
    let num = g.num_nodes();
    let (s, t) = (num, num + 1);
    let mut net = FlowNetwork::new(num + 2);
    for v in 0..num {
        net.add_edge(s, v, source_cap);
        net.add_edge(v, t, source_cap + two_g_scaled - degrees[v] as i64 * c);
    }
    for (u, v) in g.edges() {
        net.add_undirected(u, v, c);
    }
    let flow = net.max_flow(s, t);
    (flow, net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_density() {
        let g = Graph::complete(5).unwrap();
        for mode in [DensestMode::ExactFlow, DensestMode::Peel] {
            let r = densest_subgraph(&g, mode).unwrap();
            assert_eq!(r.value, 2.0);
            assert_eq!(r.witness.unwrap().as_slice(), &[0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edge_list(2, &[(0, 1)]).unwrap();
        assert_eq!(densest_subgraph(&g, DensestMode::ExactFlow).unwrap().value, 0.5);
    }

    #[test]
    fn empty_graph_errors() {
        let g = Graph::empty(4).unwrap();
        assert!(matches!(densest_subgraph(&g, DensestMode::ExactFlow), Err(Error::EmptyGraph)));
        assert_eq!(densest_at_least(&g, 2).unwrap().value, 0.0);
    }

    #[test]
    fn clique_with_pendant_path() {
        // K4 on 0..4 plus a path 3-4-5-6; the K4 has density 1.5
        let mut edges: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        edges.extend([(3, 4), (4, 5), (5, 6)]);
        let g = Graph::from_edge_list(7, &edges).unwrap();
        let r = densest_subgraph(&g, DensestMode::ExactFlow).unwrap();
        assert_eq!(r.value, 1.5);
        assert_eq!(r.witness.unwrap().as_slice(), &[0, 1, 2, 3]);
        let all = densest_at_least(&g, 7).unwrap();
        assert_eq!(all.value, 9.0 / 7.0);
        assert!(all.exact);
        let one = densest_at_least(&g, 1).unwrap();
        assert_eq!(one.value, densest_subgraph(&g, DensestMode::Peel).unwrap().value);
    }

    #[test]
    fn maximal_witness_on_ties() {
        // two disjoint triangles: both have density 1 and so does their union
        let g = Graph::from_edge_list(7, &[(0, 1), (1, 2), (0, 2), (4, 5), (5, 6), (4, 6)]).unwrap();
        let r = densest_subgraph(&g, DensestMode::ExactFlow).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.witness.unwrap().as_slice(), &[0, 1, 2, 4, 5, 6]);
    }
}
