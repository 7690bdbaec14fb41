use crate::detectors::{DetectorId, DetectorResult};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSubset};
use crate::models::half_pair;

/// Total number of edges.
pub fn total_degree_stat(g: &Graph) -> DetectorResult {
    DetectorResult::exact(DetectorId::TotalDegree, g.total_edges() as f64, None)
}

/// Largest degree; the witness is the smallest node attaining it.
pub fn max_degree_stat(g: &Graph) -> DetectorResult {
    let degrees = g.degrees();
    let (arg, &best) = degrees.iter().enumerate().fold((0, &0usize), |acc, (i, d)| if *d > *acc.1 { (i, d) } else { acc });
    DetectorResult::exact(DetectorId::MaxDegree, best as f64, Some(NodeSubset::from_sorted_unchecked(vec![arg])))
}

/// The two degree-variance estimates and the normalised gap between them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeVariance {
    pub p0_hat: f64,
    /// Null-model estimate `(N-1) N2/(N2-1) p̂(1-p̂)`.
    pub v1: f64,
    /// Spread of the degrees about `(N-1) p̂`, divided by `N - 2`.
    pub v2: f64,
    /// `v2 - v1`
    pub v: f64,
    /// `v / (sqrt(N) p̂)`
    pub v_star: f64,
}

pub fn degree_variance_parts(g: &Graph) -> Result<DegreeVariance> {
    let num = g.num_nodes();
    if num < 3 {
        return Err(Error::domain(format!("degree variance needs N >= 3, got {num}")));
    }
    if g.total_edges() == 0 {
        return Err(Error::DegenerateGraph("no edges, so p̂0 = 0 and V* is undefined".into()));
    }
    let pairs = half_pair(num as u64) as f64;
    let p0_hat = g.total_edges() as f64 / pairs;
    let nf = num as f64;
    let v1 = (nf - 1.0) * pairs / (pairs - 1.0) * p0_hat * (1.0 - p0_hat);
    let center = (nf - 1.0) * p0_hat;
    let v2 = g.degrees().iter().map(|&d| (d as f64 - center).powi(2)).sum::<f64>() / (nf - 2.0);
    let v = v2 - v1;
    Ok(DegreeVariance { p0_hat, v1, v2, v, v_star: v / (nf.sqrt() * p0_hat) })
}

/// `V*`, which grows when some nodes have unusually many neighbours among themselves.
pub fn degree_variance_stat(g: &Graph) -> Result<DetectorResult> {
    let parts = degree_variance_parts(g)?;
    Ok(DetectorResult::exact(DetectorId::DegreeVariance, parts.v_star, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edge_list(n, &edges).unwrap()
    }

    #[test]
    fn total_degree_examples() {
        assert_eq!(total_degree_stat(&Graph::complete(4).unwrap()).value, 6.0);
        assert_eq!(total_degree_stat(&Graph::empty(9).unwrap()).value, 0.0);
    }

    #[test]
    fn max_degree_examples() {
        let star = Graph::from_edge_list(6, &[(3, 0), (3, 1), (3, 2), (3, 4), (3, 5)]).unwrap();
        let r = max_degree_stat(&star);
        assert_eq!(r.value, 5.0);
        assert_eq!(r.witness.unwrap().as_slice(), &[3]);
        let e = max_degree_stat(&Graph::empty(4).unwrap());
        assert_eq!(e.value, 0.0);
        assert_eq!(e.witness.unwrap().as_slice(), &[0]);
        // ties go to the smallest index
        let two = Graph::from_edge_list(4, &[(1, 0), (1, 2), (2, 3)]).unwrap();
        assert_eq!(max_degree_stat(&two).witness.unwrap().as_slice(), &[1]);
    }

    #[test]
    fn regular_graph_has_no_spread() {
        for g in [cycle(9), Graph::complete(7).unwrap()] {
            let parts = degree_variance_parts(&g).unwrap();
            assert!(parts.v2.abs() < 1e-12, "{parts:?}");
            assert!((parts.v + parts.v1).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_variance_errors() {
        assert!(matches!(degree_variance_stat(&Graph::empty(10).unwrap()), Err(Error::DegenerateGraph(_))));
        assert!(degree_variance_stat(&Graph::complete(2).unwrap()).is_err());
    }

    #[test]
    fn degree_variance_hand_computed() {
        // star on 4 nodes: W = 3, N2 = 6, p̂ = 1/2, degrees 3,1,1,1
        let g = Graph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let p = degree_variance_parts(&g).unwrap();
        let v1 = 3.0 * 6.0 / 5.0 * 0.25;
        let v2 = (1.5f64.powi(2) + 3.0 * 0.5f64.powi(2)) / 2.0;
        assert!((p.v1 - v1).abs() < 1e-15 && (p.v2 - v2).abs() < 1e-15);
        assert!((p.v_star - (v2 - v1) / (2.0 * 0.5)).abs() < 1e-15);
    }
}
