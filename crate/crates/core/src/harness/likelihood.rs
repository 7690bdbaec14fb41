//! Likelihood ratio under a uniform prior on the planted set, by full enumeration.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernels::{binomial_u128, log_mgf, tilt_theta};
use crate::models::half_pair;

/// Largest number of subsets the enumeration will visit.
pub const LR_SUBSET_BUDGET: u128 = 1_000_000;

/// `hist[w]` = number of `n`-subsets with exactly `w` internal edges.
pub fn subset_edge_histogram(g: &Graph, n: usize) -> Result<Vec<u64>> {
    let num = g.num_nodes();
    if n < 1 || n > num {
        return Err(Error::InvalidSize { size: n, min: 1, max: num });
    }
    let required = binomial_u128(num as u64, n as u64).unwrap_or(u128::MAX);
    if required > LR_SUBSET_BUDGET {
        return Err(Error::BudgetExceeded { required, budget: LR_SUBSET_BUDGET });
    }
    let mut hist = vec![0u64; half_pair(n as u64) as usize + 1];
    let mut mask = vec![0u64; g.words()];
    fill(g, n, 0, 0, 0, &mut mask, &mut hist);
    Ok(hist)
}

fn fill(g: &Graph, n: usize, depth: usize, start: usize, w: usize, mask: &mut [u64], hist: &mut [u64]) {
    if depth == n {
        hist[w] += 1;
        return;
    }
    for v in start..=g.num_nodes() - (n - depth) {
        let add = g.degree_into(v, mask);
        mask[v / 64] |= 1u64 << (v % 64);
        fill(g, n, depth + 1, v + 1, w + add, mask, hist);
        mask[v / 64] &= !(1u64 << (v % 64));
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// `log L` for the uniform-prior likelihood ratio of `G(N, p0; n, p1)` against `G(N, p0)`.
///
/// For `p1 < 1` this averages `exp(θ W_S - Λ(θ) n^(2))` with `θ = θ_{p1}` over all
/// `n`-subsets. For `p1 = 1` the tilt is infinite and the ratio is the number of
/// `n`-cliques over its null expectation `C(N, n) p0^(n^(2))`.
pub fn log_lr_statistic(g: &Graph, n: usize, p0: f64, p1: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::domain(format!("p0 must lie in (0, 1), got {p0}")));
    }
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(Error::domain(format!("p1 must lie in (0, 1], got {p1}")));
    }
    let hist = subset_edge_histogram(g, n)?;
    if p1 == p0 {
        return Ok(0.0);
    }
    let total: u64 = hist.iter().sum();
    let n2 = half_pair(n as u64) as f64;
    if p1 == 1.0 {
        let cliques = *hist.last().expect("nonempty histogram");
        if cliques == 0 {
            return Ok(f64::NEG_INFINITY);
        }
        return Ok((cliques as f64).ln() - (total as f64).ln() - n2 * p0.ln());
    }
    let theta = tilt_theta(p1, p0)?;
    let lambda = log_mgf(theta, p0)?;
    let lse = log_sum_exp(hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(w, &c)| (c as f64).ln() + theta * w as f64));
    Ok(lse - lambda * n2 - (total as f64).ln())
}

/// `L` itself; may overflow to infinity where `log L` is finite.
pub fn lr_statistic(g: &Graph, n: usize, p0: f64, p1: f64) -> Result<f64> {
    Ok(log_lr_statistic(g, n, p0, p1)?.exp())
}
