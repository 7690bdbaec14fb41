//! Finite-size evaluation of the detection-boundary conditions.
//!
//! Every asymptotic condition is reported as a raw ratio and compared with its
//! constant: 2 for `relaxed` and `max_degree`, 0 for `clique1` (a log-scale
//! quantity), 1 for everything else. Marginal cells therefore stay visible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{bern_entropy, ln_binomial};
use crate::models::half_pair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knowledge {
    /// `p0` known; the alternative is `G(N, p0; n, p1)`.
    Known,
    /// Fixed expected total degree; the parameter given is `p0'`.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    Undetectable,
    CliqueNumberRegime,
    ScanRegime,
    TotalDegreeRegime,
    DegreeVarianceRegime,
    RelaxedScan,
    Indeterminate,
}

/// Knobs for the side conditions, which have no finite-sample constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeOptions {
    /// Largest `log(1 ∨ 1/(n p0)) / log(N/n)` still treated as quasi-normal.
    pub quasi_normal_max: f64,
    /// Smallest `n / log N` treated as "n large".
    pub n_log_min: f64,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        RegimeOptions { quasi_normal_max: 0.5, n_log_min: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideConditions {
    pub quasi_normal_ratio: f64,
    pub quasi_normal: bool,
    pub n_log_ratio: f64,
    pub n_log: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    /// Polynomial-time test certified by the conditions, if any.
    pub polynomial_label: Option<RegimeLabel>,
    /// Raw ratios, keyed by condition name.
    pub predicates: BTreeMap<String, f64>,
    /// `None` unless side conditions were requested.
    pub side_conditions: Option<SideConditions>,
}

/// Evaluate the boundary conditions at `(N, n, p, p1)` where `p` is `p0` or `p0'`.
pub fn classify_regime(num_nodes: usize, n: usize, p: f64, p1: f64, knowledge: Knowledge, constraints_check: bool) -> Result<RegimeReport> {
    classify_regime_with(num_nodes, n, p, p1, knowledge, constraints_check, RegimeOptions::default())
}

pub fn classify_regime_with(
    num_nodes: usize,
    n: usize,
    p: f64,
    p1: f64,
    knowledge: Knowledge,
    constraints_check: bool,
    options: RegimeOptions,
) -> Result<RegimeReport> {
    if num_nodes < 3 || n < 2 || n >= num_nodes {
        return Err(Error::domain(format!("need 2 <= n < N and N >= 3, got n = {n}, N = {num_nodes}")));
    }
    if !(p > 0.0 && p < 1.0) || !(p1 >= p && p1 <= 1.0) {
        return Err(Error::domain(format!("need 0 < p < 1 and p <= p1 <= 1, got p = {p}, p1 = {p1}")));
    }
    let big = num_nodes as f64;
    let nf = n as f64;
    let log_ratio = (big / nf).ln();
    let log_n = big.ln();
    let diff = p1 - p;
    let r = nf.sqrt() * diff / (p * (1.0 - p)).sqrt();
    let entropy = bern_entropy(p, p1)?;

    let mut pred = BTreeMap::new();
    pred.insert("snr".to_string(), r);
    pred.insert("scan".to_string(), nf * entropy / (2.0 * log_ratio));
    let np_over_log = nf * p / log_ratio;
    pred.insert("np0_over_log".to_string(), np_over_log);
    // the two equivalent forms of the entropy condition switch at n p = log(N/n)
    let lower2 = if np_over_log >= 1.0 {
        diff * diff / (4.0 * p * (1.0 - p)) * nf / log_ratio
    } else {
        p1 / (2.0 * (1.0 - p)) * nf / log_ratio * (log_ratio / (nf * p)).ln()
    };
    pred.insert("lower2_form".to_string(), lower2);
    let scan_threshold = if np_over_log >= 1.0 {
        2.0 * log_ratio.sqrt()
    } else {
        2.0 * log_ratio / ((nf * p).sqrt() * (log_ratio / (nf * p)).ln())
    };
    pred.insert("table_scan".to_string(), r / scan_threshold);
    pred.insert("max_degree".to_string(), nf * nf / (big * log_n) * diff * diff / (p * (1.0 - p)));
    pred.insert("densest".to_string(), nf * p1 / (big * p));
    pred.insert("relaxed".to_string(), nf / (big * log_n).sqrt() * diff * diff / p);
    let clique1 = ln_binomial(num_nodes as u64, n as u64) + half_pair(n as u64) as f64 * p.ln();
    pred.insert("clique1".to_string(), clique1);

    let (label, polynomial_label) = match knowledge {
        Knowledge::Known => {
            let total = diff / p.sqrt() * nf * nf / big;
            pred.insert("total".to_string(), total);
            pred.insert("table_total".to_string(), r / (big / nf.powf(1.5)));
            let wide = nf > big.powf(2.0 / 3.0);
            let label = if p1 == 1.0 && clique1 < 0.0 {
                RegimeLabel::CliqueNumberRegime
            } else {
                pick(wide, pred["table_total"], pred["table_scan"], total, pred["scan"], RegimeLabel::TotalDegreeRegime)
            };
            let poly = polynomial(nf > big.sqrt(), pred["table_total"], pred["relaxed"], RegimeLabel::TotalDegreeRegime);
            (label, poly)
        }
        Knowledge::Unknown => {
            let lower1 = diff / p.sqrt() * nf.powf(1.5) / big.powf(0.75);
            pred.insert("lower1_unknown".to_string(), lower1);
            pred.insert("degree_variance".to_string(), diff * diff / p * nf.powi(3) / big.powf(1.5));
            pred.insert("table_degree_variance".to_string(), r / (big.powf(0.75) / nf));
            let wide = nf > big.powf(0.75);
            let label = if p1 == 1.0 && clique1 < 0.0 {
                RegimeLabel::CliqueNumberRegime
            } else {
                pick(wide, pred["table_degree_variance"], pred["table_scan"], lower1, pred["scan"], RegimeLabel::DegreeVarianceRegime)
            };
            let poly = polynomial(nf > big.sqrt(), pred["table_degree_variance"], pred["relaxed"], RegimeLabel::DegreeVarianceRegime);
            (label, poly)
        }
    };

    let side_conditions = constraints_check.then(|| {
        let quasi_normal_ratio = (1.0f64 / (nf * p)).max(1.0).ln() / log_ratio;
        let n_log_ratio = nf / log_n;
        SideConditions {
            quasi_normal_ratio,
            quasi_normal: quasi_normal_ratio <= options.quasi_normal_max,
            n_log_ratio,
            n_log: n_log_ratio >= options.n_log_min,
        }
    });
    Ok(RegimeReport { label, polynomial_label, predicates: pred, side_conditions })
}

/// Table cell first, then either test on its own, then the lower bound.
fn pick(wide: bool, table_global: f64, table_scan: f64, global: f64, scan: f64, global_label: RegimeLabel) -> RegimeLabel {
    let cell = if wide { (table_global, global_label) } else { (table_scan, RegimeLabel::ScanRegime) };
    if cell.0 > 1.0 {
        return cell.1;
    }
    if global > 1.0 {
        return global_label;
    }
    if scan > 1.0 {
        return RegimeLabel::ScanRegime;
    }
    if global < 1.0 && scan < 1.0 {
        return RegimeLabel::Undetectable;
    }
    RegimeLabel::Indeterminate
}

fn polynomial(wide: bool, table_global: f64, relaxed: f64, global_label: RegimeLabel) -> Option<RegimeLabel> {
    if wide && table_global > 1.0 {
        Some(global_label)
    } else if !wide && relaxed > 2.0 {
        Some(RegimeLabel::RelaxedScan)
    } else {
        None
    }
}
