//! Maximum clique by branch and bound with greedy colouring bounds.

use crate::detectors::{DetectorId, DetectorResult};
use crate::error::{Error, Result};
use crate::graph::{iter_bits, Graph, GraphBuilder, NodeSubset};

/// Default cap on search-tree nodes across both search phases.
pub const DEFAULT_CLIQUE_NODE_BUDGET: u64 = 50_000_000;

pub fn clique_number(g: &Graph) -> Result<DetectorResult> {
    clique_number_with_budget(g, DEFAULT_CLIQUE_NODE_BUDGET)
}

/// `ω(G)` with the lexicographically smallest maximum clique as witness.
///
/// The search runs twice: once on the degeneracy-ordered graph to find `ω`,
/// then in index order to extract the first clique of that size. Exceeding
/// `node_budget` search nodes yields [`Error::TimeBudgetExceeded`] with the
/// best bracket found so far.
pub fn clique_number_with_budget(g: &Graph, node_budget: u64) -> Result<DetectorResult> {
    let num = g.num_nodes();
    let relabeled = degeneracy_relabel(g);
    let words = g.words();
    let all: Vec<u64> = {
        let mut m = vec![0u64; words];
        for v in 0..num {
            m[v / 64] |= 1u64 << (v % 64);
        }
        m
    };
    let upper = color_classes(&relabeled, &all).last().map_or(0, |&(_, c)| c);

    let mut search = Search { g: &relabeled, budget: node_budget, nodes: 0, best: 0, target: 0, found: Vec::new(), chosen: Vec::new() };
    if search.maximum(all.clone()).is_err() {
        return Err(Error::TimeBudgetExceeded { lower: search.best, upper: upper.max(search.best) });
    }
    let omega = search.best;

    let mut first = Search { g, budget: node_budget.saturating_sub(search.nodes), nodes: 0, best: 0, target: omega, found: Vec::new(), chosen: Vec::new() };
    match first.first_of_size(all) {
        Ok(true) => {}
        _ => return Err(Error::TimeBudgetExceeded { lower: omega, upper: omega }),
    }
    Ok(DetectorResult::exact(DetectorId::CliqueNumber, omega as f64, Some(NodeSubset::from_sorted_unchecked(first.found))))
}

struct BudgetExhausted;

struct Search<'g> {
    g: &'g Graph,
    budget: u64,
    nodes: u64,
    best: usize,
    target: usize,
    found: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn tick(&mut self) -> std::result::Result<(), BudgetExhausted> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExhausted);
        }
        Ok(())
    }

    /// Tomita-style search for the maximum clique size.
    fn maximum(&mut self, mut cand: Vec<u64>) -> std::result::Result<(), BudgetExhausted> {
        self.tick()?;
        let classes = color_classes(self.g, &cand);
        for &(v, color) in classes.iter().rev() {
            if self.chosen.len() + color <= self.best {
                return Ok(());
            }
            self.chosen.push(v);
            let next: Vec<u64> = cand.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            if next.iter().all(|&w| w == 0) {
                if self.chosen.len() > self.best {
                    self.best = self.chosen.len();
                }
            } else {
                self.maximum(next)?;
            }
            self.chosen.pop();
            cand[v / 64] &= !(1u64 << (v % 64));
        }
        Ok(())
    }

    /// Index-order search for the first clique of size `target`.
    fn first_of_size(&mut self, mut cand: Vec<u64>) -> std::result::Result<bool, BudgetExhausted> {
        self.tick()?;
        if self.chosen.len() == self.target {
            self.found = self.chosen.clone();
            return Ok(true);
        }
        let need = self.target - self.chosen.len();
        let count: usize = cand.iter().map(|w| w.count_ones() as usize).sum();
        if count < need {
            return Ok(false);
        }
        if color_classes(self.g, &cand).last().map_or(0, |&(_, c)| c) < need {
            return Ok(false);
        }
        let members: Vec<usize> = iter_bits(&cand).collect();
        for (k, &v) in members.iter().enumerate() {
            if members.len() - k < need {
                break;
            }
            self.chosen.push(v);
            let next: Vec<u64> = cand.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            if self.first_of_size(next)? {
                return Ok(true);
            }
            self.chosen.pop();
            cand[v / 64] &= !(1u64 << (v % 64));
        }
        Ok(false)
    }
}

/// Greedy sequential colouring of the candidate set in index order. Returns
/// `(vertex, colour)` pairs sorted by colour, colours starting at 1.
fn color_classes(g: &Graph, cand: &[u64]) -> Vec<(usize, usize)> {
    let mut uncolored = cand.to_vec();
    let mut out = Vec::new();
    let mut color = 0;
    while uncolored.iter().any(|&w| w != 0) {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(v) = first_bit(&avail) {
            out.push((v, color));
            uncolored[v / 64] &= !(1u64 << (v % 64));
            avail[v / 64] &= !(1u64 << (v % 64));
            for (a, r) in avail.iter_mut().zip(g.row(v)) {
                *a &= !r;
            }
        }
    }
    out
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

/// Relabel so that index order is the reverse of a minimum-degree removal order.
fn degeneracy_relabel(g: &Graph) -> Graph {
    let num = g.num_nodes();
    let mut deg = g.degrees();
    let mut removed = vec![false; num];
    let mut removal = Vec::with_capacity(num);
    for _ in 0..num {
        let v = (0..num).filter(|&v| !removed[v]).min_by_key(|&v| (deg[v], v)).expect("node left");
        removed[v] = true;
        removal.push(v);
        for u in g.neighbors(v) {
            if !removed[u] {
                deg[u] -= 1;
            }
        }
    }
    removal.reverse();
    let mut position = vec![0; num];
    for (new, &old) in removal.iter().enumerate() {
        position[old] = new;
    }
    let mut b = GraphBuilder::new(num);
    for (u, v) in g.edges() {
        b.insert(position[u], position[v]);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graphs() {
        for n in 1..=9 {
            let r = clique_number(&Graph::complete(n).unwrap()).unwrap();
            assert_eq!(r.value, n as f64);
            assert_eq!(r.witness.unwrap(), NodeSubset::prefix(n));
        }
    }

    #[test]
    fn triangle_plus_isolated() {
        let g = Graph::from_edge_list(8, &[(5, 6), (6, 7), (5, 7)]).unwrap();
        let r = clique_number(&g).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.witness.unwrap().as_slice(), &[5, 6, 7]);
    }

    #[test]
    fn empty_graph_has_singleton_cliques() {
        let r = clique_number(&Graph::empty(10).unwrap()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.witness.unwrap().as_slice(), &[0]);
    }

    #[test]
    fn lexicographic_witness() {
        // two triangles; the one on smaller indices wins
        let g = Graph::from_edge_list(7, &[(4, 5), (5, 6), (4, 6), (1, 3), (3, 6), (1, 6)]).unwrap();
        assert_eq!(clique_number(&g).unwrap().witness.unwrap().as_slice(), &[1, 3, 6]);
    }

    #[test]
    fn budget_is_reported() {
        let g = Graph::complete(12).unwrap();
        match clique_number_with_budget(&g, 3) {
            Err(Error::TimeBudgetExceeded { lower, upper }) => assert!(lower <= 12 && upper >= 12),
            other => panic!("{other:?}"),
        }
    }
}
