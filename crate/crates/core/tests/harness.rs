use subgraph_sentinel::detectors::{Detector, ScanMode};
use subgraph_sentinel::harness::{
    bonferroni_calibrate, calibrate, calibrate_analytic, count_rejections, estimate_risk, estimate_risk_with, lr_oracle_risk,
    quantile_rank, simulate_statistics, BootstrapTest, DecisionRule, SweepConfig,
};
use subgraph_sentinel::kernels::BinomialPmf;
use subgraph_sentinel::models::{half_pair, Placement};
use subgraph_sentinel::ModelSpec;

#[test]
fn threshold_is_the_ranked_order_statistic() {
    let null = ModelSpec::null(25, 0.2);
    let t = calibrate(&Detector::MaxDegree, &null, 0.1, 149, 3).unwrap();
    let mut values = simulate_statistics(&Detector::MaxDegree, &null, 149, 3).unwrap();
    values.sort_by(f64::total_cmp);
    // ceil(0.9 * 150) = 135
    assert_eq!(quantile_rank(0.1, 149).unwrap(), 135);
    assert_eq!(t.threshold, values[134]);
    assert!(t.rejects_value(t.threshold + 1.0) && !t.rejects_value(t.threshold));
}

#[test]
fn monte_carlo_level_control() {
    let null = ModelSpec::null(30, 0.2);
    for detector in [Detector::TotalDegree, Detector::MaxDegree, Detector::Scan { n: 4, mode: ScanMode::Greedy }] {
        let t = calibrate(&detector, &null, 0.1, 199, 11).unwrap();
        let reps = 2000;
        let rejections = count_rejections(&DecisionRule::Calibrated(t), &null, reps, 12, Placement::Spec).unwrap();
        let level = rejections as f64 / reps as f64;
        // sampling slack of three standard errors at the nominal level
        assert!(level <= 0.1 + 3.0 * (0.09f64 / reps as f64).sqrt(), "{}: level {level}", detector.label());
    }
}

#[test]
fn analytic_threshold_is_exact_quantile() {
    let null = ModelSpec::null(40, 0.2);
    let t = calibrate_analytic(&null, 0.05).unwrap();
    let pmf = BinomialPmf::new(half_pair(40), 0.2).unwrap();
    let k = t.threshold as usize;
    assert!(pmf.upper_tail(k + 1) <= 0.05);
    assert!(pmf.upper_tail(k) > 0.05);
    let mc = calibrate(&Detector::TotalDegree, &null, 0.05, 1999, 5).unwrap();
    assert!((mc.threshold - t.threshold).abs() <= 4.0, "mc {} analytic {}", mc.threshold, t.threshold);
}

#[test]
fn bonferroni_controls_combined_level() {
    let null = ModelSpec::null(30, 0.2);
    let detectors = [Detector::TotalDegree, Detector::MaxDegree, Detector::Scan { n: 4, mode: ScanMode::Greedy }];
    let test = bonferroni_calibrate(&detectors, &null, 0.15, 199, 21).unwrap();
    assert_eq!(test.components.len(), 3);
    assert!((test.alpha() - 0.15).abs() < 1e-12);
    let reps = 1500;
    let r = count_rejections(&DecisionRule::Bonferroni(test), &null, reps, 22, Placement::Spec).unwrap();
    assert!(r as f64 / reps as f64 <= 0.15 + 3.0 * (0.15f64 * 0.85 / reps as f64).sqrt());
}

#[test]
fn bootstrap_level_is_near_nominal() {
    let null = ModelSpec::null(30, 0.15);
    let test = BootstrapTest::new(Detector::MaxDegree, 0.1, 99, 31).unwrap();
    let reps = 400;
    let r = count_rejections(&DecisionRule::Bootstrap(test), &null, reps, 32, Placement::Spec).unwrap();
    let level = r as f64 / reps as f64;
    // plug-in p0 makes the level approximate, so allow the sampling slack twice over
    assert!(level <= 0.1 + 6.0 * (0.09f64 / reps as f64).sqrt(), "level {level}");
}

#[test]
fn risk_is_deterministic_and_thread_independent() {
    let null = ModelSpec::null(30, 0.1);
    let alt = ModelSpec::planted(30, 6, 0.1, 0.6);
    let rule = DecisionRule::Calibrated(calibrate(&Detector::Scan { n: 6, mode: ScanMode::Greedy }, &null, 0.05, 99, 1).unwrap());
    let a = estimate_risk(&rule, &null, &alt, 120, 9).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = one.install(|| estimate_risk(&rule, &null, &alt, 120, 9).unwrap());
    let c = three.install(|| estimate_risk(&rule, &null, &alt, 120, 9).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.replicates, 120);
    assert_eq!(a.ci_method, "clopper_pearson_95");
    assert!((a.gamma_hat - a.type1_hat - a.type2_hat).abs() < 1e-15);
}

#[test]
fn random_placement_changes_draws_not_distribution() {
    let null = ModelSpec::null(24, 0.1);
    let alt = ModelSpec::planted(24, 6, 0.1, 0.9);
    let rule = DecisionRule::FixedThreshold { detector: Detector::Scan { n: 6, mode: ScanMode::BranchBound }, threshold: 10.0 };
    let fixed = estimate_risk_with(&rule, &null, &alt, 400, 2, Placement::Spec).unwrap();
    let random = estimate_risk_with(&rule, &null, &alt, 400, 2, Placement::UniformRandom).unwrap();
    assert_eq!(fixed.type1_hat, random.type1_hat);
    assert!((fixed.type2_hat - random.type2_hat).abs() <= fixed.type2_half_width + random.type2_half_width);
}

#[test]
fn likelihood_ratio_dominates_small_instances() {
    let cases = [(10usize, 4usize, 0.2, 0.8), (12, 3, 0.3, 0.9), (9, 5, 0.1, 0.5), (11, 4, 0.25, 1.0)];
    for (k, &(num, n, p0, p1)) in cases.iter().enumerate() {
        let null = ModelSpec::null(num, p0);
        let alt = ModelSpec::planted(num, n, p0, p1);
        let lr = lr_oracle_risk(&null, &alt, 600, 40 + k as u64).unwrap();
        let scan = DecisionRule::Calibrated(calibrate(&Detector::Scan { n, mode: ScanMode::Exact }, &null, 0.1, 199, 50 + k as u64).unwrap());
        let other = estimate_risk(&scan, &null, &alt, 600, 60 + k as u64).unwrap();
        assert!(lr.gamma_hat <= other.gamma_hat + lr.half_width + other.half_width, "case {k}: lr {} scan {}", lr.gamma_hat, other.gamma_hat);
    }
    let fixed = ModelSpec::fixed_degree(10, 4, 0.2, 0.8);
    assert!(lr_oracle_risk(&ModelSpec::null(10, 0.2), &fixed, 10, 1).is_err());
    assert!(lr_oracle_risk(&ModelSpec::null(10, 0.3), &ModelSpec::planted(10, 4, 0.2, 0.8), 10, 1).is_err());
}

#[test]
fn sweep_config_parses_from_json() {
    let text = r#"{
        "grid": {"N": [50], "n": [5], "p0": [0.1], "p1": [0.5]},
        "model": "fixed_degree",
        "detectors": [{"detector": "degree_variance"}, {"detector": "densest_subgraph", "mode": "peel"}],
        "alpha": 0.05,
        "replicates": 10,
        "calibration_replicates": 19,
        "calibration": "ParametricBootstrap",
        "seed": 1
    }"#;
    let cfg: SweepConfig = serde_json::from_str(text).unwrap();
    assert_eq!(cfg.detectors.len(), 2);
    assert!(serde_json::from_str::<SweepConfig>(&text.replace("\"seed\"", "\"sead\"")).is_err());
}
