//! Monte Carlo estimates of type-I, type-II and total risk.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::Detector;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::harness::calibrate::{BonferroniTest, BootstrapTest, CalibratedTest};
use crate::harness::likelihood::log_lr_statistic;
use crate::kernels::clopper_pearson;
use crate::models::{derive_seed, sample_with, ModelSpec, Placement, SeededStream, Variant};

/// Anything that maps a graph to reject / accept.
#[derive(Debug)]
pub enum DecisionRule {
    Calibrated(CalibratedTest),
    Bonferroni(BonferroniTest),
    Bootstrap(BootstrapTest),
    /// Reject iff the statistic is strictly above a fixed value.
    FixedThreshold { detector: Detector, threshold: f64 },
    /// Reject iff the uniform-prior likelihood ratio exceeds 1.
    LikelihoodRatio { n: usize, p0: f64, p1: f64 },
}

impl DecisionRule {
    pub fn rejects(&self, g: &Graph) -> Result<bool> {
        match self {
            DecisionRule::Calibrated(t) => t.rejects(g),
            DecisionRule::Bonferroni(t) => t.rejects(g),
            DecisionRule::Bootstrap(t) => t.rejects(g),
            DecisionRule::FixedThreshold { detector, threshold } => Ok(detector.evaluate(g)?.value > *threshold),
            DecisionRule::LikelihoodRatio { n, p0, p1 } => Ok(log_lr_statistic(g, *n, *p0, *p1)? > 0.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DecisionRule::Calibrated(t) => t.detector.label(),
            DecisionRule::Bonferroni(t) => {
                let parts: Vec<String> = t.components.iter().map(|c| c.detector.label()).collect();
                format!("bonferroni({})", parts.join("+"))
            }
            DecisionRule::Bootstrap(t) => format!("{}@bootstrap", t.detector.label()),
            DecisionRule::FixedThreshold { detector, threshold } => format!("{}>{threshold}", detector.label()),
            DecisionRule::LikelihoodRatio { n, .. } => format!("likelihood_ratio[n={n}]"),
        }
    }
}

/// Empirical risk with exact 95% Clopper–Pearson half-widths.
///
/// Each half-width is the larger distance from the point estimate to an end
/// of its interval; `half_width` is their sum and bounds the error of `gamma_hat`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub type1_hat: f64,
    pub type2_hat: f64,
    pub gamma_hat: f64,
    pub type1_half_width: f64,
    pub type2_half_width: f64,
    pub half_width: f64,
    pub replicates: usize,
    pub ci_method: String,
    pub spec_null: ModelSpec,
    pub spec_alt: ModelSpec,
}

fn half_width(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let (lo, hi) = clopper_pearson(successes as u64, trials as u64, 0.05);
    let p = successes as f64 / trials as f64;
    (p - lo).max(hi - p)
}

impl RiskReport {
    pub fn from_counts(null_rejections: usize, alt_acceptances: usize, replicates: usize, spec_null: ModelSpec, spec_alt: ModelSpec) -> Self {
        let b = replicates.max(1) as f64;
        let type1_hat = null_rejections as f64 / b;
        let type2_hat = alt_acceptances as f64 / b;
        let h1 = half_width(null_rejections, replicates);
        let h2 = half_width(alt_acceptances, replicates);
        RiskReport {
            type1_hat,
            type2_hat,
            gamma_hat: type1_hat + type2_hat,
            type1_half_width: h1,
            type2_half_width: h2,
            half_width: h1 + h2,
            replicates,
            ci_method: "clopper_pearson_95".into(),
            spec_null,
            spec_alt,
        }
    }
}

pub(crate) fn check_pair(null_spec: &ModelSpec, alt_spec: &ModelSpec) -> Result<()> {
    if null_spec.variant != Variant::Null {
        return Err(Error::InvalidSpecPair("first model must be the null".into()));
    }
    if alt_spec.variant == Variant::Null {
        return Err(Error::InvalidSpecPair("second model must be a planted alternative".into()));
    }
    if null_spec.num_nodes != alt_spec.num_nodes {
        return Err(Error::InvalidSpecPair(format!("node counts differ: {} vs {}", null_spec.num_nodes, alt_spec.num_nodes)));
    }
    null_spec.validate().map_err(|e| Error::InvalidSpecPair(e.to_string()))?;
    alt_spec.validate().map_err(|e| Error::InvalidSpecPair(e.to_string()))?;
    Ok(())
}

/// Number of graphs among `replicates` draws from `spec` on which `rule` rejects.
pub fn count_rejections(rule: &DecisionRule, spec: &ModelSpec, replicates: usize, seed: u64, placement: Placement) -> Result<usize> {
    let flags: Vec<bool> = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let s = sample_with(spec, SeededStream::new(seed, b), placement)?;
            rule.rejects(&s.graph)
        })
        .collect::<Result<_>>()?;
    Ok(flags.into_iter().filter(|&r| r).count())
}

pub fn estimate_risk(rule: &DecisionRule, null_spec: &ModelSpec, alt_spec: &ModelSpec, replicates: usize, seed: u64) -> Result<RiskReport> {
    estimate_risk_with(rule, null_spec, alt_spec, replicates, seed, Placement::Spec)
}

/// Risk estimate with independent null and alternative streams derived from `seed`.
/// `Placement::UniformRandom` draws the community from the uniform prior instead
/// of the fixed planted set.
pub fn estimate_risk_with(
    rule: &DecisionRule,
    null_spec: &ModelSpec,
    alt_spec: &ModelSpec,
    replicates: usize,
    seed: u64,
    placement: Placement,
) -> Result<RiskReport> {
    check_pair(null_spec, alt_spec)?;
    let null_rejections = count_rejections(rule, null_spec, replicates, derive_seed(seed, 1), Placement::Spec)?;
    let alt_rejections = count_rejections(rule, alt_spec, replicates, derive_seed(seed, 2), placement)?;
    Ok(RiskReport::from_counts(null_rejections, replicates - alt_rejections, replicates, null_spec.clone(), alt_spec.clone()))
}

/// Risk of the likelihood ratio test `{L > 1}`, the Bayes test for the uniform prior.
pub fn lr_oracle_risk(null_spec: &ModelSpec, alt_spec: &ModelSpec, replicates: usize, seed: u64) -> Result<RiskReport> {
    check_pair(null_spec, alt_spec)?;
    if alt_spec.variant != Variant::PlantedKnownP0 {
        return Err(Error::InvalidSpecPair("the likelihood ratio oracle needs the known-p0 alternative".into()));
    }
    let p0 = null_spec.p0.expect("validated");
    if alt_spec.p0 != Some(p0) {
        return Err(Error::InvalidSpecPair("null and alternative disagree on p0".into()));
    }
    let rule = DecisionRule::LikelihoodRatio { n: alt_spec.n.expect("validated"), p0, p1: alt_spec.p1.expect("validated") };
    estimate_risk(&rule, null_spec, alt_spec, replicates, seed)
}
