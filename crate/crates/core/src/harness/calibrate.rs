//! Rejection thresholds from null simulations, bootstrap and exact binomial quantiles.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::Detector;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernels::BinomialPmf;
use crate::models::{half_pair, sample, ModelSpec, SeededStream, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CalibrationMethod {
    MonteCarloKnownP0,
    ParametricBootstrap,
    AnalyticBinomial,
}

/// A statistic with its rejection threshold. The test rejects iff the
/// statistic is strictly greater than `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedTest {
    pub detector: Detector,
    pub threshold: f64,
    pub alpha: f64,
    pub method: CalibrationMethod,
    pub seed: u64,
    pub replicates: usize,
    pub null_spec: ModelSpec,
}

impl CalibratedTest {
    pub fn rejects_value(&self, statistic: f64) -> bool {
        statistic > self.threshold
    }

    pub fn rejects(&self, g: &Graph) -> Result<bool> {
        Ok(self.rejects_value(self.detector.evaluate(g)?.value))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// 1-based rank `⌈(1 - alpha)(B + 1)⌉` of the order statistic used as threshold.
pub fn quantile_rank(alpha: f64, replicates: usize) -> Result<usize> {
    check_alpha(alpha)?;
    // the small slack keeps exact products such as 0.95 * 200 from rounding up
    let rank = (((1.0 - alpha) * (replicates as f64 + 1.0)) - 1e-9).ceil().max(1.0) as usize;
    if rank > replicates {
        return Err(Error::InsufficientReplicates { rank, replicates });
    }
    Ok(rank)
}

/// Detector values on `replicates` independent draws from `spec`; replicate
/// `b` uses stream `(seed, b)`.
pub fn simulate_statistics(detector: &Detector, spec: &ModelSpec, replicates: usize, seed: u64) -> Result<Vec<f64>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let s = sample(spec, SeededStream::new(seed, b))?;
            Ok(detector.evaluate(&s.graph)?.value)
        })
        .collect()
}

fn order_statistic(mut values: Vec<f64>, rank: usize) -> f64 {
    values.sort_by(f64::total_cmp);
    values[rank - 1]
}

/// Monte Carlo calibration under a fully specified null.
pub fn calibrate(detector: &Detector, null_spec: &ModelSpec, alpha: f64, replicates: usize, seed: u64) -> Result<CalibratedTest> {
    if null_spec.variant != Variant::Null {
        return Err(Error::InvalidSpec("calibration needs a null model".into()));
    }
    null_spec.validate()?;
    let rank = quantile_rank(alpha, replicates)?;
    let values = simulate_statistics(detector, null_spec, replicates, seed)?;
    Ok(CalibratedTest {
        detector: detector.clone(),
        threshold: order_statistic(values, rank),
        alpha,
        method: CalibrationMethod::MonteCarloKnownP0,
        seed,
        replicates,
        null_spec: null_spec.clone(),
    })
}

/// Exact `1 - alpha` quantile of `Bin(N^(2), p0)` for the total degree.
pub fn calibrate_analytic(null_spec: &ModelSpec, alpha: f64) -> Result<CalibratedTest> {
    check_alpha(alpha)?;
    if null_spec.variant != Variant::Null {
        return Err(Error::InvalidSpec("calibration needs a null model".into()));
    }
    null_spec.validate()?;
    let pairs = half_pair(null_spec.num_nodes as u64);
    let pmf = BinomialPmf::new(pairs, null_spec.p0.expect("validated"))?;
    Ok(CalibratedTest {
        detector: Detector::TotalDegree,
        threshold: pmf.upper_quantile(alpha) as f64,
        alpha,
        method: CalibrationMethod::AnalyticBinomial,
        seed: 0,
        replicates: 0,
        null_spec: null_spec.clone(),
    })
}

/// Maximum likelihood edge probability `W / N^(2)`.
pub fn estimate_p0_hat(g: &Graph) -> f64 {
    let pairs = half_pair(g.num_nodes() as u64);
    if pairs == 0 {
        return 0.0;
    }
    g.total_edges() as f64 / pairs as f64
}

/// Monte Carlo calibration under `G(N, p̂0)` with `p̂0` estimated from `observed`.
pub fn bootstrap_calibrate(detector: &Detector, observed: &Graph, alpha: f64, replicates: usize, seed: u64) -> Result<CalibratedTest> {
    let p_hat = estimate_p0_hat(observed);
    if p_hat <= 0.0 || p_hat >= 1.0 {
        return Err(Error::DegenerateGraph(format!("estimated edge probability is {p_hat}")));
    }
    let null = ModelSpec::null(observed.num_nodes(), p_hat);
    let mut t = calibrate(detector, &null, alpha, replicates, seed)?;
    t.method = CalibrationMethod::ParametricBootstrap;
    Ok(t)
}

/// Parametric bootstrap test. The threshold depends on the observed graph only
/// through its edge count, so thresholds are cached per count.
#[derive(Debug)]
pub struct BootstrapTest {
    pub detector: Detector,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    cache: Mutex<HashMap<(usize, usize), f64>>,
}

impl BootstrapTest {
    pub fn new(detector: Detector, alpha: f64, replicates: usize, seed: u64) -> Result<Self> {
        quantile_rank(alpha, replicates)?;
        Ok(BootstrapTest { detector, alpha, replicates, seed, cache: Mutex::new(HashMap::new()) })
    }

    pub fn threshold_for(&self, observed: &Graph) -> Result<f64> {
        let key = (observed.num_nodes(), observed.total_edges());
        if let Some(&t) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(t);
        }
        let t = bootstrap_calibrate(&self.detector, observed, self.alpha, self.replicates, self.seed)?.threshold;
        self.cache.lock().expect("cache lock").insert(key, t);
        Ok(t)
    }

    pub fn rejects(&self, g: &Graph) -> Result<bool> {
        let t = self.threshold_for(g)?;
        Ok(self.detector.evaluate(g)?.value > t)
    }
}

/// Union of component tests; each should be calibrated at `alpha / k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonferroniTest {
    pub components: Vec<CalibratedTest>,
}

impl BonferroniTest {
    /// Sum of component levels; an upper bound on the combined type-I error.
    pub fn alpha(&self) -> f64 {
        self.components.iter().map(|t| t.alpha).sum()
    }

    pub fn rejects(&self, g: &Graph) -> Result<bool> {
        for t in &self.components {
            if t.rejects(g)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn bonferroni_combine(tests: Vec<CalibratedTest>) -> Result<BonferroniTest> {
    let Some(first) = tests.first() else {
        return Err(Error::InvalidSpec("Bonferroni combination needs at least one test".into()));
    };
    if tests.iter().any(|t| t.null_spec != first.null_spec) {
        return Err(Error::MismatchedNullSpec);
    }
    Ok(BonferroniTest { components: tests })
}

/// Calibrate every detector at `alpha / k` (with distinct derived seeds) and combine.
pub fn bonferroni_calibrate(detectors: &[Detector], null_spec: &ModelSpec, alpha: f64, replicates: usize, seed: u64) -> Result<BonferroniTest> {
    let k = detectors.len().max(1) as f64;
    let tests = detectors
        .iter()
        .enumerate()
        .map(|(i, d)| calibrate(d, null_spec, alpha / k, replicates, crate::models::derive_seed(seed, 100 + i as u64)))
        .collect::<Result<Vec<_>>>()?;
    bonferroni_combine(tests)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_arithmetic() {
        assert_eq!(quantile_rank(0.05, 199).unwrap(), 190);
        assert_eq!(quantile_rank(0.05, 999).unwrap(), 950);
        assert_eq!(quantile_rank(0.5, 1).unwrap(), 1);
        assert!(matches!(quantile_rank(0.01, 50), Err(Error::InsufficientReplicates { rank: 51, replicates: 50 })));
        assert!(quantile_rank(0.0, 100).is_err());
    }

    #[test]
    fn p0_hat_examples() {
        assert_eq!(estimate_p0_hat(&Graph::complete(6).unwrap()), 1.0);
        assert_eq!(estimate_p0_hat(&Graph::empty(6).unwrap()), 0.0);
        let path = Graph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        assert!((estimate_p0_hat(&path) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bootstrap_rejects_degenerate_graphs() {
        let r = bootstrap_calibrate(&Detector::TotalDegree, &Graph::complete(5).unwrap(), 0.05, 99, 1);
        assert!(matches!(r, Err(Error::DegenerateGraph(_))));
    }

    #[test]
    fn calibration_is_deterministic() {
        let null = ModelSpec::null(30, 0.2);
        let a = calibrate(&Detector::MaxDegree, &null, 0.1, 99, 5).unwrap();
        let b = calibrate(&Detector::MaxDegree, &null, 0.1, 99, 5).unwrap();
        assert_eq!(a, b);
        assert!(calibrate(&Detector::MaxDegree, &ModelSpec::planted(30, 5, 0.2, 0.5), 0.1, 99, 5).is_err());
    }

    #[test]
    fn bonferroni_requires_matching_nulls() {
        let a = calibrate_analytic(&ModelSpec::null(20, 0.2), 0.05).unwrap();
        let b = calibrate_analytic(&ModelSpec::null(20, 0.3), 0.05).unwrap();
        assert!(matches!(bonferroni_combine(vec![a.clone(), b]), Err(Error::MismatchedNullSpec)));
        let single = bonferroni_combine(vec![a.clone()]).unwrap();
        let g = Graph::complete(20).unwrap();
        assert_eq!(single.rejects(&g).unwrap(), a.rejects(&g).unwrap());
        assert!(bonferroni_combine(vec![]).is_err());
    }
}
