//! Squared adjacency, sparse eigenvalues and the thresholded dual bound behind
//! the relaxed scan statistic.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detectors::{DetectorId, DetectorResult};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSubset};

/// Graphs up to this size get exact sparse eigenvalues by enumerating supports.
pub const ENUMERATION_MAX_NODES: usize = 14;

/// Largest number of thresholds tried by the relaxed scan.
pub const Z_GRID_CAP: usize = 256;

const RANDOM_RESTARTS: usize = 10;
const RESTART_SEED: u64 = 0x5eed_0f_b1a5;
const TRUNCATED_POWER_ITERS: usize = 200;
const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 10_000;

/// `B = W²` as a dense symmetric integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquaredAdjacency {
    dim: usize,
    entries: Vec<u32>,
}

impl SquaredAdjacency {
    /// `B_ii` is the degree of `i`, `B_ij` the number of common neighbours.
    pub fn from_graph(g: &Graph) -> Self {
        let dim = g.num_nodes();
        let mut entries = vec![0u32; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = g.degree_unchecked(i) as u32;
            for j in i + 1..dim {
                let c = g.degree_into(i, g.row(j)) as u32;
                entries[i * dim + j] = c;
                entries[j * dim + i] = c;
            }
        }
        SquaredAdjacency { dim, entries }
    }

    /// Any symmetric nonnegative integer matrix given row-major.
    pub fn from_matrix(dim: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::domain(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::domain(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SquaredAdjacency { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0u32; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        SquaredAdjacency { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim + j]
    }

    fn principal(&self, support: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(support.len(), support.len(), |a, b| self.get(support[a], support[b]) as f64)
    }
}

/// Largest eigenvalue of a dense symmetric matrix given row-major.
pub fn sym_lambda_max(dim: usize, entries: &[f64]) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    lambda_max_dense(DMatrix::from_row_slice(dim, dim, entries))
}

fn lambda_max_dense(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Lower bound on `max_{|S| = n} λmax(B_S)` together with the support attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseEigLower {
    pub value: f64,
    pub support: NodeSubset,
    /// Set when every support was enumerated.
    pub exact: bool,
}

pub fn sparse_eig_lower(b: &SquaredAdjacency, n: usize) -> Result<SparseEigLower> {
    let dim = b.dim();
    if n < 1 || n > dim {
        return Err(Error::InvalidSize { size: n, min: 1, max: dim });
    }
    if dim <= ENUMERATION_MAX_NODES {
        return Ok(enumerate_supports(b, n));
    }
    Ok(truncated_power(b, n))
}

fn enumerate_supports(b: &SquaredAdjacency, n: usize) -> SparseEigLower {
    let dim = b.dim();
    let mut support: Vec<usize> = (0..n).collect();
    let mut best = (f64::NEG_INFINITY, support.clone());
    loop {
        let v = lambda_max_dense(b.principal(&support));
        if v > best.0 {
            best = (v, support.clone());
        }
        // next combination in lexicographic order
        let Some(i) = (0..n).rev().find(|&i| support[i] < dim - n + i) else { break };
        support[i] += 1;
        for k in i + 1..n {
            support[k] = support[k - 1] + 1;
        }
    }
    SparseEigLower { value: best.0, support: NodeSubset::from_sorted_unchecked(best.1), exact: true }
}

/// Truncated power iteration from the top-degree support and a few random ones.
fn truncated_power(b: &SquaredAdjacency, n: usize) -> SparseEigLower {
    let dim = b.dim();
    let dense: Vec<f64> = b.entries.iter().map(|&x| x as f64).collect();

    let mut starts: Vec<Vec<usize>> = Vec::with_capacity(RANDOM_RESTARTS + 1);
    let mut by_degree: Vec<usize> = (0..dim).collect();
    by_degree.sort_by_key(|&i| (std::cmp::Reverse(b.get(i, i)), i));
    starts.push(by_degree[..n].to_vec());
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    for _ in 0..RANDOM_RESTARTS {
        starts.push(sample_indices(&mut rng, dim, n).into_vec());
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut y = vec![0.0; dim];
    for mut support in starts {
        support.sort_unstable();
        let mut x = vec![0.0; dim];
        for &i in &support {
            x[i] = 1.0 / (n as f64).sqrt();
        }
        for _ in 0..TRUNCATED_POWER_ITERS {
            for (i, yi) in y.iter_mut().enumerate() {
                let row = &dense[i * dim..(i + 1) * dim];
                *yi = support.iter().map(|&j| row[j] * x[j]).sum();
            }
            let next = top_support(&y, n);
            let norm = next.iter().map(|&i| y[i] * y[i]).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v = 0.0);
            for &i in &next {
                x[i] = y[i] / norm;
            }
            if next == support {
                break;
            }
            support = next;
        }
        let value = lambda_max_dense(b.principal(&support));
        let better = match &best {
            None => true,
            Some((v, s)) => value > *v || (value == *v && support < *s),
        };
        if better {
            best = Some((value, support));
        }
    }
    let (value, support) = best.expect("at least one start");
    SparseEigLower { value, support: NodeSubset::from_sorted_unchecked(support), exact: false }
}

/// Indices of the `n` largest magnitudes, smaller index first on ties, sorted.
fn top_support(y: &[f64], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| y[b].abs().total_cmp(&y[a].abs()).then(a.cmp(&b)));
    idx.truncate(n);
    idx.sort_unstable();
    idx
}

/// Candidate thresholds: zero and the distinct entries of `B`, quantile-thinned
/// to at most [`Z_GRID_CAP`] values.
pub fn z_grid(b: &SquaredAdjacency) -> Vec<f64> {
    let mut values: Vec<u32> = b.entries.clone();
    values.push(0);
    values.sort_unstable();
    values.dedup();
    if values.len() > Z_GRID_CAP {
        let m = values.len();
        let mut thinned: Vec<u32> = (0..Z_GRID_CAP).map(|k| values[((k * (m - 1)) as f64 / (Z_GRID_CAP - 1) as f64).round() as usize]).collect();
        thinned.dedup();
        values = thinned;
    }
    values.into_iter().map(f64::from).collect()
}

/// Certified upper bound on `λmax` of `B` with entries `<= z` set to zero.
///
/// Uses shifted power iteration on each connected block with the
/// Collatz–Wielandt bound `max_i (Ax)_i / x_i`, stopped once it is within a
/// relative `1e-8` of the Rayleigh quotient.
pub fn lambda_max_upper(b: &SquaredAdjacency, z: f64) -> f64 {
    let mut warm = Vec::new();
    thresholded_lambda_upper(b, z, &mut warm)
}

/// `λmax(τ_z(B)) + n z`, an upper bound on the semidefinite relaxation of the
/// `n`-sparse eigenvalue for every `z >= 0`.
pub fn sdp_dual_bound(b: &SquaredAdjacency, n: usize, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain(format!("threshold must be nonnegative, got {z}")));
    }
    Ok(lambda_max_upper(b, z) + n as f64 * z)
}

struct Csr {
    nodes: Vec<usize>,
    start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

fn thresholded_lambda_upper(b: &SquaredAdjacency, z: f64, warm: &mut Vec<f64>) -> f64 {
    let dim = b.dim();
    if warm.len() != dim {
        *warm = vec![0.0; dim];
    }
    // local CSR over rows with at least one kept entry
    let mut local = vec![usize::MAX; dim];
    let mut csr = Csr { nodes: Vec::new(), start: vec![0], cols: Vec::new(), vals: Vec::new() };
    for i in 0..dim {
        let row = &b.entries[i * dim..(i + 1) * dim];
        if row.iter().any(|&x| f64::from(x) > z) {
            local[i] = csr.nodes.len();
            csr.nodes.push(i);
        }
    }
    if csr.nodes.is_empty() {
        return 0.0;
    }
    for &i in &csr.nodes {
        let row = &b.entries[i * dim..(i + 1) * dim];
        for (j, &x) in row.iter().enumerate() {
            if f64::from(x) > z {
                csr.cols.push(local[j]);
                csr.vals.push(f64::from(x));
            }
        }
        csr.start.push(csr.cols.len());
    }

    // connected blocks, processed by decreasing row-sum bound
    let k = csr.nodes.len();
    let mut comp = vec![usize::MAX; k];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for r in 0..k {
        if comp[r] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        comp[r] = id;
        let mut members = vec![r];
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for e in csr.start[u]..csr.start[u + 1] {
                let v = csr.cols[e];
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    let mut pos = vec![0usize; k];
    for members in &blocks {
        for (a, &r) in members.iter().enumerate() {
            pos[r] = a;
        }
    }
    let row_sum = |r: usize| csr.vals[csr.start[r]..csr.start[r + 1]].iter().sum::<f64>();
    let mut ranked: Vec<(f64, usize)> = blocks.iter().enumerate().map(|(id, m)| (m.iter().map(|&r| row_sum(r)).fold(0.0, f64::max), id)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut best: f64 = 0.0;
    for (bound, id) in ranked {
        if bound <= best {
            break;
        }
        best = best.max(block_upper(&csr, &blocks[id], &pos, warm));
    }
    best
}

fn block_upper(csr: &Csr, members: &[usize], pos: &[usize], warm: &mut [f64]) -> f64 {
    if members.len() == 1 {
        let r = members[0];
        return csr.vals[csr.start[r]..csr.start[r + 1]].iter().sum::<f64>() * (1.0 + 1e-12);
    }
    let mut max_entry: f64 = 0.0;
    for &r in members {
        for e in csr.start[r]..csr.start[r + 1] {
            max_entry = max_entry.max(csr.vals[e]);
        }
    }
    let shift = 0.5 * max_entry;
    let m = members.len();
    let scale = members.iter().map(|&r| warm[csr.nodes[r]]).fold(0.0, f64::max);
    let mut x: Vec<f64> = if scale > 0.0 {
        members.iter().map(|&r| (warm[csr.nodes[r]] / scale).max(1e-3)).collect()
    } else {
        vec![1.0; m]
    };
    let mut y = vec![0.0; m];
    let mut upper = f64::INFINITY;
    for _ in 0..POWER_MAX_ITERS {
        let mut ratio_max = f64::NEG_INFINITY;
        let mut xax = 0.0;
        let mut xx = 0.0;
        for (a, &r) in members.iter().enumerate() {
            let mut s = 0.0;
            for e in csr.start[r]..csr.start[r + 1] {
                s += csr.vals[e] * x[pos[csr.cols[e]]];
            }
            xax += x[a] * s;
            xx += x[a] * x[a];
            y[a] = s + shift * x[a];
            ratio_max = ratio_max.max(y[a] / x[a]);
        }
        upper = upper.min(ratio_max - shift);
        let rayleigh = xax / xx;
        let top = y.iter().copied().fold(0.0, f64::max);
        for (xa, ya) in x.iter_mut().zip(&y) {
            *xa = (ya / top).max(1e-200);
        }
        if upper - rayleigh <= POWER_TOL * upper.abs() {
            break;
        }
    }
    for (a, &r) in members.iter().enumerate() {
        warm[csr.nodes[r]] = x[a];
    }
    upper * (1.0 + 1e-12)
}

/// Relaxed scan statistic: the smallest thresholded dual bound over [`z_grid`].
///
/// The result carries the sparse-eigenvalue lower bound in `lower_bound`, so
/// `lower_bound <= value` brackets the semidefinite relaxation.
pub fn relaxed_scan_stat(g: &Graph, n: usize) -> Result<DetectorResult> {
    let num = g.num_nodes();
    if n < 1 || n > num {
        return Err(Error::InvalidSize { size: n, min: 1, max: num });
    }
    let b = SquaredAdjacency::from_graph(g);
    let lower = sparse_eig_lower(&b, n)?;
    let nf = n as f64;
    let mut best = f64::INFINITY;
    let mut warm = Vec::new();
    for z in z_grid(&b) {
        if nf * z >= best {
            break;
        }
        // λmax of a nonnegative matrix dominates each of its entries
        let kept_max = b.entries.iter().map(|&x| f64::from(x)).filter(|&x| x > z).fold(0.0, f64::max);
        if kept_max + nf * z >= best {
            continue;
        }
        best = best.min(thresholded_lambda_upper(&b, z, &mut warm) + nf * z);
    }
    let mut r = DetectorResult::inexact(DetectorId::RelaxedScan, best, None);
    r.lower_bound = Some(lower.value);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_adjacency_of_triangle() {
        let b = SquaredAdjacency::from_graph(&Graph::complete(3).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(b.get(i, j), if i == j { 2 } else { 1 });
            }
        }
        let e = SquaredAdjacency::from_graph(&Graph::empty(4).unwrap());
        assert!(e.entries.iter().all(|&x| x == 0));
        assert!(SquaredAdjacency::from_matrix(2, vec![0, 1, 2, 0]).is_err());
    }

    #[test]
    fn identity_sparse_eigenvalue() {
        let b = SquaredAdjacency::identity(20);
        for n in [1, 3, 20] {
            assert!((sparse_eig_lower(&b, n).unwrap().value - 1.0).abs() < 1e-12);
        }
        let small = SquaredAdjacency::identity(6);
        let r = sparse_eig_lower(&small, 3).unwrap();
        assert!(r.exact && (r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_spectrum() {
        let b = SquaredAdjacency::from_graph(&Graph::complete(5).unwrap());
        assert!((sparse_eig_lower(&b, 5).unwrap().value - 16.0).abs() < 1e-10);
        let up = lambda_max_upper(&b, 0.0);
        assert!(up >= 16.0 && up - 16.0 < 1e-6, "{up}");
    }

    #[test]
    fn dual_bound_examples() {
        let b = SquaredAdjacency::identity(5);
        assert!((sdp_dual_bound(&b, 3, 0.5).unwrap() - 2.5).abs() < 1e-9);
        assert!((sdp_dual_bound(&b, 3, 1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((sdp_dual_bound(&b, 3, 0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(sdp_dual_bound(&b, 3, -1.0).is_err());
        let grid_min = [0.0, 0.5, 1.0].iter().map(|&z| sdp_dual_bound(&b, 3, z).unwrap()).fold(f64::INFINITY, f64::min);
        assert!((grid_min - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grid_is_capped_and_sorted() {
        let dim = 40;
        let entries: Vec<u32> = (0..dim * dim).map(|k| ((k / dim) * (k % dim)) as u32).collect();
        let b = SquaredAdjacency::from_matrix(dim, entries).unwrap();
        let grid = z_grid(&b);
        assert!(grid.len() <= Z_GRID_CAP);
        assert_eq!(grid[0], 0.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn relaxed_scan_on_empty_and_complete() {
        let r = relaxed_scan_stat(&Graph::empty(8).unwrap(), 3).unwrap();
        assert_eq!((r.value, r.lower_bound), (0.0, Some(0.0)));
        let k = relaxed_scan_stat(&Graph::complete(6).unwrap(), 6).unwrap();
        assert!(k.lower_bound.unwrap() <= k.value);
        assert!((k.value - 25.0).abs() < 1e-6);
        assert!(relaxed_scan_stat(&Graph::complete(6).unwrap(), 0).is_err());
    }

    #[test]
    fn disconnected_blocks() {
        // K4 and K3 far apart: λmax(W²) = 9
        let mut edges: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        edges.extend([(10, 11), (11, 12), (10, 12)]);
        let b = SquaredAdjacency::from_graph(&Graph::from_edge_list(20, &edges).unwrap());
        let up = lambda_max_upper(&b, 0.0);
        assert!(up >= 9.0 && up < 9.0 + 1e-6);
    }
}
