//! Undirected simple graphs stored as bit-packed adjacency rows.
//!
//! Each row occupies `ceil(N / 64)` words, so the number of edges inside an
//! arbitrary vertex subset is a masked popcount over the rows of the subset.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, duplicate-free list of node indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct NodeSubset(Vec<usize>);

impl NodeSubset {
    /// Builds a subset from indices in any order. Repeated indices are rejected.
    pub fn new(mut nodes: Vec<usize>) -> Result<Self> {
        nodes.sort_unstable();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("node {} listed twice in subset", w[0])));
        }
        Ok(NodeSubset(nodes))
    }

    /// `{0, 1, ..., n-1}`
    pub fn prefix(n: usize) -> Self {
        NodeSubset((0..n).collect())
    }

    pub(crate) fn from_sorted_unchecked(nodes: Vec<usize>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        NodeSubset(nodes)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Fails unless every index lies in `[0, num_nodes)`.
    pub fn check(&self, num_nodes: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= num_nodes => Err(Error::IndexOutOfRange { index: last, num_nodes }),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for NodeSubset {
    type Error = Error;

    fn try_from(nodes: Vec<usize>) -> Result<Self> {
        NodeSubset::new(nodes)
    }
}

impl From<NodeSubset> for Vec<usize> {
    fn from(s: NodeSubset) -> Self {
        s.0
    }
}

/// Immutable undirected simple graph on nodes `0..N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    words: usize,
    bits: Vec<u64>,
    num_edges: usize,
}

#[inline]
pub(crate) fn words_for(num_nodes: usize) -> usize {
    num_nodes.div_ceil(64)
}

/// Edge-list builder used by the samplers; edges are set directly in the bit rows.
pub(crate) struct GraphBuilder {
    num_nodes: usize,
    words: usize,
    bits: Vec<u64>,
}

impl GraphBuilder {
    pub(crate) fn new(num_nodes: usize) -> Self {
        let words = words_for(num_nodes);
        GraphBuilder { num_nodes, words, bits: vec![0; num_nodes * words] }
    }

    /// Returns `true` if the edge was new.
    #[inline]
    pub(crate) fn insert(&mut self, i: usize, j: usize) -> bool {
        debug_assert!(i != j && i < self.num_nodes && j < self.num_nodes);
        let wi = i * self.words + j / 64;
        let mask = 1u64 << (j % 64);
        if self.bits[wi] & mask != 0 {
            return false;
        }
        self.bits[wi] |= mask;
        self.bits[j * self.words + i / 64] |= 1u64 << (i % 64);
        true
    }

    pub(crate) fn build(self) -> Graph {
        let total: u64 = self.bits.iter().map(|w| u64::from(w.count_ones())).sum();
        Graph { num_nodes: self.num_nodes, words: self.words, bits: self.bits, num_edges: (total / 2) as usize }
    }
}

impl Graph {
    /// Builds a graph from unordered pairs. Duplicate pairs collapse to one edge.
    pub fn from_edge_list(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::domain("graph must have at least one node"));
        }
        let mut b = GraphBuilder::new(num_nodes);
        for &(i, j) in edges {
            for idx in [i, j] {
                if idx >= num_nodes {
                    return Err(Error::IndexOutOfRange { index: idx, num_nodes });
                }
            }
            if i == j {
                return Err(Error::SelfLoopRejected(i));
            }
            b.insert(i, j);
        }
        Ok(b.build())
    }

    pub fn empty(num_nodes: usize) -> Result<Self> {
        Self::from_edge_list(num_nodes, &[])
    }

    pub fn complete(num_nodes: usize) -> Result<Self> {
        let edges: Vec<_> = (0..num_nodes).flat_map(|i| (i + 1..num_nodes).map(move |j| (i, j))).collect();
        Self::from_edge_list(num_nodes, &edges)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of unordered edges.
    pub fn total_edges(&self) -> usize {
        self.num_edges
    }

    #[inline]
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] & (1u64 << (j % 64)) != 0
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.num_nodes {
            return Err(Error::IndexOutOfRange { index: i, num_nodes: self.num_nodes });
        }
        Ok(())
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        self.check_node(i)?;
        Ok(self.degree_unchecked(i))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_nodes).map(|i| self.degree_unchecked(i)).collect()
    }

    /// Neighbours of `i` in increasing order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(i))
    }

    /// All edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Bit mask over nodes with the given members set.
    pub(crate) fn mask<I: IntoIterator<Item = usize>>(&self, nodes: I) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for v in nodes {
            m[v / 64] |= 1u64 << (v % 64);
        }
        m
    }

    /// Number of neighbours of `i` inside the masked set.
    #[inline]
    pub(crate) fn degree_into(&self, i: usize, mask: &[u64]) -> usize {
        self.row(i).iter().zip(mask).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// Number of edges with both endpoints in `subset`.
    pub fn subgraph_edges(&self, subset: &NodeSubset) -> Result<usize> {
        subset.check(self.num_nodes)?;
        Ok(self.subgraph_edges_unchecked(subset.as_slice()))
    }

    pub(crate) fn subgraph_edges_unchecked(&self, nodes: &[usize]) -> usize {
        let mask = self.mask(nodes.iter().copied());
        let twice: usize = nodes.iter().map(|&v| self.degree_into(v, &mask)).sum();
        twice / 2
    }

    /// Graph with exactly the non-edges of `self` as edges.
    pub fn complement(&self) -> Graph {
        let mut bits = self.bits.clone();
        for i in 0..self.num_nodes {
            let row = &mut bits[i * self.words..(i + 1) * self.words];
            for w in row.iter_mut() {
                *w = !*w;
            }
            row[i / 64] &= !(1u64 << (i % 64));
            let tail = self.num_nodes % 64;
            if tail != 0 {
                row[self.words - 1] &= (1u64 << tail) - 1;
            }
        }
        let n = self.num_nodes;
        Graph { num_nodes: n, words: self.words, bits, num_edges: n * (n - 1) / 2 - self.num_edges }
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(k * 64 + t)
        })
    })
}

/// Result of parsing an edge-list file.
#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// Edge lines that repeated an earlier pair and were collapsed.
    pub duplicate_lines: usize,
}

/// Parses the `N M` + `i j` edge-list format.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<ParsedGraph> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    let (num_nodes, num_lines) = loop {
        match lines.next() {
            None => return Err(parse_err(1, "missing header line \"N M\"".into())),
            Some((k, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let f = two_fields(&line).ok_or_else(|| parse_err(k + 1, format!("expected \"N M\", found {line:?}")))?;
                if f.0 == 0 {
                    return Err(parse_err(k + 1, "node count must be positive".into()));
                }
                break f;
            }
        }
    };

    let mut b = GraphBuilder::new(num_nodes);
    let mut seen = 0usize;
    let mut duplicates = 0usize;
    for (k, line) in lines {
        let line = line?;
        let lineno = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        if seen == num_lines {
            return Err(parse_err(lineno, format!("more than the declared {num_lines} edge lines")));
        }
        let (i, j) = two_fields(&line).ok_or_else(|| parse_err(lineno, format!("expected \"i j\", found {line:?}")))?;
        if i >= num_nodes || j >= num_nodes {
            return Err(parse_err(lineno, format!("index {} out of range for N = {num_nodes}", i.max(j))));
        }
        if i == j {
            return Err(parse_err(lineno, format!("self loop on node {i}")));
        }
        if !b.insert(i, j) {
            duplicates += 1;
        }
        seen += 1;
    }
    if seen < num_lines {
        return Err(parse_err(seen + 2, format!("expected {num_lines} edge lines, found {seen}")));
    }
    Ok(ParsedGraph { graph: b.build(), duplicate_lines: duplicates })
}

fn two_fields(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

pub fn read_graph<P: AsRef<Path>>(path: P) -> Result<ParsedGraph> {
    parse_edge_list(fs::File::open(path)?)
}

/// Serialises `g` to the edge-list text format.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.total_edges());
    let _ = writeln!(out, "{} {}", g.num_nodes(), g.total_edges());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn write_graph<P: AsRef<Path>>(g: &Graph, path: P) -> Result<()> {
    fs::write(path, format_edge_list(g))?;
    Ok(())
}
