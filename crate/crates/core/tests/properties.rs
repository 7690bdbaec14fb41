use proptest::prelude::*;

use subgraph_sentinel::detectors::{densest_subgraph, scan_stat, DensestMode, ScanMode};
use subgraph_sentinel::graph::{format_edge_list, parse_edge_list};
use subgraph_sentinel::{Graph, NodeSubset};

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (2..=max_nodes).prop_flat_map(|num| {
        let pairs = num * (num - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..num {
                for j in i + 1..num {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::from_edge_list(num, &edges).unwrap()
        })
    })
}

fn graph_and_mask(max_nodes: usize) -> impl Strategy<Value = (Graph, Vec<bool>)> {
    graph_strategy(max_nodes).prop_flat_map(|g| {
        let num = g.num_nodes();
        (Just(g), proptest::collection::vec(any::<bool>(), num))
    })
}

fn subset(mask: &[bool]) -> NodeSubset {
    NodeSubset::new(mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()).unwrap()
}

fn pair_loop(g: &Graph, s: &NodeSubset) -> usize {
    let v = s.as_slice();
    let mut c = 0;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            c += g.has_edge(v[a], v[b]) as usize;
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn degree_sum_is_twice_edge_count(g in graph_strategy(40)) {
        let sum: usize = g.degrees().iter().sum();
        prop_assert_eq!(sum, 2 * g.total_edges());
        prop_assert_eq!(g.edges().count(), g.total_edges());
    }

    #[test]
    fn subgraph_edges_match_pair_loop((g, mask) in graph_and_mask(15)) {
        let s = subset(&mask);
        prop_assert_eq!(g.subgraph_edges(&s).unwrap(), pair_loop(&g, &s));
        let all = NodeSubset::prefix(g.num_nodes());
        prop_assert_eq!(g.subgraph_edges(&all).unwrap(), g.total_edges());
    }

    #[test]
    fn subgraph_edges_are_monotone((g, mask) in graph_and_mask(20), extra in any::<u64>()) {
        let small = subset(&mask);
        let grown: Vec<bool> = mask.iter().enumerate().map(|(i, &b)| b || (extra >> (i % 64)) & 1 == 1).collect();
        let big = subset(&grown);
        prop_assert!(g.subgraph_edges(&small).unwrap() <= g.subgraph_edges(&big).unwrap());
    }

    #[test]
    fn edge_list_round_trip(g in graph_strategy(30)) {
        let text = format_edge_list(&g);
        let back = parse_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(back.duplicate_lines, 0);
        prop_assert_eq!(&back.graph, &g);
        prop_assert_eq!(format_edge_list(&back.graph), text);
    }

    #[test]
    fn complement_partitions_pairs(g in graph_strategy(25)) {
        let c = g.complement();
        let num = g.num_nodes();
        prop_assert_eq!(g.total_edges() + c.total_edges(), num * (num - 1) / 2);
        for i in 0..num {
            for j in i + 1..num {
                prop_assert_ne!(g.has_edge(i, j), c.has_edge(i, j));
            }
        }
    }

    #[test]
    fn greedy_scan_never_exceeds_exact(g in graph_strategy(12), n_frac in 0.0f64..1.0) {
        let n = 1 + (n_frac * (g.num_nodes() - 1) as f64) as usize;
        let exact = scan_stat(&g, n, ScanMode::Exact).unwrap();
        let bb = scan_stat(&g, n, ScanMode::BranchBound).unwrap();
        let greedy = scan_stat(&g, n, ScanMode::Greedy).unwrap();
        prop_assert_eq!(exact.value, bb.value);
        prop_assert_eq!(&exact.witness, &bb.witness);
        prop_assert!(greedy.value <= exact.value);
        let w = greedy.witness.unwrap();
        prop_assert_eq!(w.len(), n);
        prop_assert_eq!(g.subgraph_edges(&w).unwrap() as f64, greedy.value);
    }

    #[test]
    fn peel_is_at_least_half_of_exact(g in graph_strategy(30)) {
        prop_assume!(g.total_edges() > 0);
        let exact = densest_subgraph(&g, DensestMode::ExactFlow).unwrap();
        let peel = densest_subgraph(&g, DensestMode::Peel).unwrap();
        prop_assert!(peel.value <= exact.value + 1e-12);
        prop_assert!(peel.value >= 0.5 * exact.value - 1e-12);
    }
}
