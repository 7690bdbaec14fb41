use subgraph_sentinel::kernels::{
    bern_entropy, bernstein_tail, binomial_u128, chernoff_tail, ln_binomial, log_binom_bounds, log_mgf, second_moment_gap,
    second_moment_gap_tilted, snr, tilt_theta, two_moment_ratio, BinomialPmf,
};

/// `P(Bin(n, p) >= k)` from exact integer coefficients, summed upward from `k`.
fn exact_tail(n: u64, p: f64, k: u64) -> f64 {
    (k..=n).map(|j| binomial_u128(n, j).unwrap() as f64 * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32)).sum()
}

fn grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / (count + 1) as f64).collect()
}

#[test]
fn entropy_examples() {
    for p in grid(9) {
        assert_eq!(bern_entropy(p, p).unwrap(), 0.0);
    }
    assert!((bern_entropy(0.5, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
    // 0.3 ln 3 + 0.7 ln(7/9)
    let direct = 0.3 * 3f64.ln() + 0.7 * (7.0f64 / 9.0).ln();
    assert!((bern_entropy(0.1, 0.3).unwrap() - direct).abs() < 1e-15);
    assert!((bern_entropy(0.1, 0.3).unwrap() - 0.153_663_586_803_8).abs() < 1e-12);
    assert!((bern_entropy(0.2, 0.0).unwrap() + 0.8f64.ln()).abs() < 1e-15);
    assert!(bern_entropy(0.0, 0.5).is_err());
    assert!(bern_entropy(1.0, 0.5).is_err());
}

#[test]
fn tilt_and_mgf_examples() {
    assert_eq!(tilt_theta(0.3, 0.3).unwrap(), 0.0);
    assert!((tilt_theta(0.75, 0.25).unwrap() - 9f64.ln()).abs() < 1e-14);
    assert!((tilt_theta(0.25, 0.75).unwrap() + 9f64.ln()).abs() < 1e-14);
    assert!(tilt_theta(1.0, 0.5).is_err() && tilt_theta(0.0, 0.5).is_err());
    for p0 in grid(9) {
        assert_eq!(log_mgf(0.0, p0).unwrap(), 0.0);
    }
    assert!((log_mgf(3f64.ln(), 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
    // large tilts stay finite
    let big = log_mgf(800.0, 0.3).unwrap();
    assert!((big - (800.0 + 0.3f64.ln())).abs() < 1e-12);
    assert!(log_mgf(f64::INFINITY, 0.3).is_err());
}

#[test]
fn log_mgf_is_convex() {
    for p0 in grid(9) {
        let thetas: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.25).collect();
        for w in thetas.windows(3) {
            let mid = log_mgf(w[1], p0).unwrap();
            let chord = 0.5 * (log_mgf(w[0], p0).unwrap() + log_mgf(w[2], p0).unwrap());
            assert!(mid <= chord + 1e-12);
        }
    }
}

#[test]
fn fenchel_identity_on_grid() {
    assert!((bern_entropy(0.2, 0.6).unwrap() - (0.6 * tilt_theta(0.6, 0.2).unwrap() - log_mgf(tilt_theta(0.6, 0.2).unwrap(), 0.2).unwrap())).abs() < 1e-12);
    let mut worst = 0.0f64;
    for p0 in grid(30) {
        for q in grid(30) {
            let theta = tilt_theta(q, p0).unwrap();
            let rhs = q * theta - log_mgf(theta, p0).unwrap();
            worst = worst.max((bern_entropy(p0, q).unwrap() - rhs).abs());
        }
    }
    assert!(worst < 1e-10, "worst Fenchel gap {worst}");
}

#[test]
fn delta_forms_agree() {
    assert_eq!(second_moment_gap(0.3, 0.3).unwrap(), 0.0);
    assert!((second_moment_gap(0.25, 0.75).unwrap() - (7.0f64 / 3.0).ln()).abs() < 1e-15);
    let mut worst = 0.0f64;
    for i in 1..=20 {
        for j in 1..=20 {
            let p0 = i as f64 / 21.0;
            let p1 = p0 + (1.0 - p0) * (j - 1) as f64 / 20.0;
            worst = worst.max((second_moment_gap(p0, p1).unwrap() - second_moment_gap_tilted(p0, p1).unwrap()).abs());
        }
    }
    assert!(worst < 1e-12, "worst Delta gap {worst}");
    assert!(second_moment_gap(0.5, 0.4).is_err() && second_moment_gap(0.5, 1.0).is_err());
}

#[test]
fn chernoff_and_bernstein_dominate_exact_tails() {
    assert_eq!(chernoff_tail(25, 0.3, 0.3).unwrap(), 1.0);
    assert_eq!(bernstein_tail(25, 0.3, 0.0).unwrap(), 1.0);
    assert!(chernoff_tail(10, 0.3, 0.7).unwrap() >= exact_tail(10, 0.3, 7));
    assert!(bernstein_tail(100, 0.2, 20.0).unwrap() >= exact_tail(100, 0.2, 40));
    for n in 1..=60u64 {
        for p0 in grid(19) {
            let pmf = BinomialPmf::new(n, p0).unwrap();
            for k in 0..=n {
                let exact = exact_tail(n, p0, k);
                assert!((pmf.upper_tail(k as usize) - exact).abs() <= 1e-12 * exact.max(1e-300) + 1e-15);
                let q = k as f64 / n as f64;
                if q >= p0 {
                    assert!(chernoff_tail(n, p0, q).unwrap() * (1.0 + 1e-12) >= exact, "chernoff n={n} p0={p0} k={k}");
                }
                let x = k as f64 - n as f64 * p0;
                if x >= 0.0 {
                    assert!(bernstein_tail(n, p0, x).unwrap() * (1.0 + 1e-12) >= exact, "bernstein n={n} p0={p0} k={k}");
                }
            }
        }
    }
}

#[test]
fn tail_bounds_are_monotone() {
    let qs: Vec<f64> = (0..=50).map(|i| 0.3 + 0.7 * i as f64 / 50.0).collect();
    for w in qs.windows(2) {
        assert!(chernoff_tail(40, 0.3, w[1]).unwrap() <= chernoff_tail(40, 0.3, w[0]).unwrap());
    }
    for i in 0..50 {
        let (a, b) = (i as f64 * 0.5, (i + 1) as f64 * 0.5);
        assert!(bernstein_tail(40, 0.3, b).unwrap() < bernstein_tail(40, 0.3, a).unwrap());
    }
    assert!(chernoff_tail(10, 0.5, 0.4).is_err());
    assert!(bernstein_tail(10, 0.5, -1.0).is_err());
}

#[test]
fn entropy_asymptotic_regimes() {
    // quadratic regime near p0
    for p0 in [1e-4, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9] {
        for s in [-1.0, -0.5, 0.5, 1.0] {
            let q = p0 * (1.0 + 0.01 * s);
            let h = bern_entropy(p0, q).unwrap();
            let quad = (q - p0).powi(2) / (2.0 * p0 * (1.0 - p0));
            assert!(((h - quad) / h).abs() < 0.05, "p0={p0} q={q}");
        }
    }
    // large ratio regime: H ~ q log(q/p0), with relative correction about 1/log(q/p0)
    let q = 1e-2;
    let ratio = |p0: f64| bern_entropy(p0, q).unwrap() / (q * (q / p0).ln());
    assert!((ratio(1e-6) - 0.891_981_815_083_162_5).abs() < 1e-12);
    let ratios: Vec<f64> = [1e-6, 1e-8, 1e-10, 1e-12, 1e-16].iter().map(|&p| ratio(p)).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]) && ratios[4] > 0.969 && ratios[4] < 1.0);
    // second order form p0 (r log r - r + 1)
    let p0 = 1e-6;
    let refined = bern_entropy(p0, q).unwrap() / (q * (q / p0).ln() - q + p0);
    assert!((refined - 1.0).abs() < 1e-3, "{refined}");
}

#[test]
fn binomial_bounds_bracket_exact() {
    let (lo, hi) = log_binom_bounds(4, 2).unwrap();
    assert!((lo - 4f64.ln()).abs() < 1e-15 && (hi - 2.0 * (2.0 * std::f64::consts::E).ln()).abs() < 1e-14);
    assert!(lo <= 6f64.ln() && 6f64.ln() <= hi);
    let (lo, hi) = log_binom_bounds(7, 7).unwrap();
    assert_eq!((lo, hi), (0.0, 7.0));
    for n in 1..=40u64 {
        for k in 1..=n {
            let exact = (binomial_u128(n, k).unwrap() as f64).ln();
            assert!((ln_binomial(n, k) - exact).abs() < 1e-10);
            let (lo, hi) = log_binom_bounds(n, k).unwrap();
            assert!(lo <= exact + 1e-12 && exact <= hi + 1e-12, "n={n} k={k}");
        }
    }
    assert!(log_binom_bounds(3, 0).is_err() && log_binom_bounds(3, 4).is_err());
}

#[test]
fn snr_and_two_moment_ratio() {
    assert_eq!(snr(50, 0.2, 0.2).unwrap(), 0.0);
    assert!((snr(100, 0.1, 0.4).unwrap() - 10.0).abs() < 1e-12);
    assert!((snr(400, 0.1, 0.4).unwrap() / snr(100, 0.1, 0.4).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(two_moment_ratio(3.0, 1.0, 3.0, 2.0).unwrap(), 0.0);
    assert_eq!(two_moment_ratio(0.0, 1.0, 10.0, 4.0).unwrap(), 5.0);
    assert!(two_moment_ratio(1.0, 0.0, 1.0, 0.0).is_err());

    // total degree moments at N=100, n=30, p0=0.1, p1=0.5
    let (big, small) = (4950.0, 435.0);
    let (p0, p1) = (0.1f64, 0.5f64);
    let r = two_moment_ratio(big * p0, big * p0 * (1.0 - p0), big * p0 + small * (p1 - p0), big * p0 * (1.0 - p0) + small * (p1 * (1.0 - p1) - p0 * (1.0 - p0))).unwrap();
    let expected = small * (p1 - p0) / (big * p0 * (1.0 - p0) + small * (p1 * (1.0 - p1) - p0 * (1.0 - p0))).sqrt();
    assert!((r - expected).abs() < 1e-12);
}

#[test]
fn kernels_are_bit_deterministic() {
    for p0 in grid(7) {
        for q in grid(7) {
            assert_eq!(bern_entropy(p0, q).unwrap().to_bits(), bern_entropy(p0, q).unwrap().to_bits());
            assert_eq!(tilt_theta(q, p0).unwrap().to_bits(), tilt_theta(q, p0).unwrap().to_bits());
        }
    }
}
