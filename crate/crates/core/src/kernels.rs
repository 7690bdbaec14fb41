//! Scalar analytic kernels: Bernoulli relative entropy, exponential tilting,
//! binomial tail bounds, exact binomial probabilities and the signal-to-noise
//! quantities used by the regime classifier.

use crate::error::{Error, Result};

fn check_open_unit(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {p} must lie in (0, 1)")))
    }
}

fn check_closed_unit(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {p} must lie in [0, 1]")))
    }
}

/// Relative entropy `H_p(q)` of Bern(q) with respect to Bern(p).
///
/// Endpoints are taken by continuity: `H_p(0) = -log(1-p)` and `H_p(1) = -log p`.
pub fn bern_entropy(p: f64, q: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    check_closed_unit("q", q)?;
    if q == 0.0 {
        return Ok(-(-p).ln_1p());
    }
    if q == 1.0 {
        return Ok(-p.ln());
    }
    // relative forms keep precision when q is close to p
    let up = q * ((q - p) / p).ln_1p();
    let down = (1.0 - q) * ((p - q) / (1.0 - p)).ln_1p();
    Ok((up + down).max(0.0))
}

/// `h(p) = p log p + (1-p) log(1-p)` with `h(0) = h(1) = 0`.
pub fn neg_binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    term(p) + term(1.0 - p)
}

/// Exponential tilt `θ_q = log(q (1-p0) / (p0 (1-q)))` that moves the mean of Bern(p0) to `q`.
pub fn tilt_theta(q: f64, p0: f64) -> Result<f64> {
    check_open_unit("q", q)?;
    check_open_unit("p0", p0)?;
    Ok((q.ln() - p0.ln()) + ((-p0).ln_1p() - (-q).ln_1p()))
}

/// Log moment generating function of Bern(p0): `Λ(θ) = log(1 - p0 + p0 e^θ)`.
pub fn log_mgf(theta: f64, p0: f64) -> Result<f64> {
    check_open_unit("p0", p0)?;
    if !theta.is_finite() {
        return Err(Error::domain(format!("tilt θ = {theta} is not finite")));
    }
    if theta > 0.0 {
        // θ + log(p0 + (1 - p0) e^{-θ}) never overflows
        Ok(theta + (p0 + (1.0 - p0) * (-theta).exp()).ln())
    } else {
        Ok((p0 * theta.exp_m1()).ln_1p())
    }
}

/// Closed form of `Δ = Λ(2θ) - 2Λ(θ)` at `θ = θ_{p1}`: `log(1 + (p1-p0)² / (p0(1-p0)))`.
pub fn second_moment_gap(p0: f64, p1: f64) -> Result<f64> {
    check_open_unit("p0", p0)?;
    if !(p1 >= p0 && p1 < 1.0) {
        return Err(Error::domain(format!("p1 = {p1} must lie in [p0, 1)")));
    }
    let d = p1 - p0;
    Ok((d * d / (p0 * (1.0 - p0))).ln_1p())
}

/// `Δ` evaluated through the tilt and the log-MGF.
pub fn second_moment_gap_tilted(p0: f64, p1: f64) -> Result<f64> {
    check_open_unit("p0", p0)?;
    if !(p1 >= p0 && p1 < 1.0) {
        return Err(Error::domain(format!("p1 = {p1} must lie in [p0, 1)")));
    }
    let theta = tilt_theta(p1, p0)?;
    Ok(log_mgf(2.0 * theta, p0)? - 2.0 * log_mgf(theta, p0)?)
}

/// Chernoff bound `exp(-n H_{p0}(q))` on `P(Bin(n, p0) >= q n)`, for `q >= p0`.
pub fn chernoff_tail(n_trials: u64, p0: f64, q: f64) -> Result<f64> {
    check_open_unit("p0", p0)?;
    if !(q >= p0 && q <= 1.0) {
        return Err(Error::domain(format!("q = {q} must lie in [p0, 1]")));
    }
    Ok((-(n_trials as f64) * bern_entropy(p0, q)?).exp())
}

/// Bernstein bound on `P(Bin(n, p0) >= n p0 + x)`.
pub fn bernstein_tail(n_trials: u64, p0: f64, x: f64) -> Result<f64> {
    check_open_unit("p0", p0)?;
    if !(x >= 0.0) {
        return Err(Error::domain(format!("deviation x = {x} must be nonnegative")));
    }
    let var = n_trials as f64 * p0 * (1.0 - p0);
    Ok((-x * x / (2.0 * (var + x / 3.0))).exp())
}

/// `log C(n, k)`, summed term by term.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Exact `C(n, k)` when it fits in 128 bits.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(acc)
}

/// Bracket `(k log(n/k), k log(n e / k))` around `log C(n, k)`.
pub fn log_binom_bounds(n: u64, k: u64) -> Result<(f64, f64)> {
    if !(1 <= k && k <= n) {
        return Err(Error::domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let ratio = n as f64 / k as f64;
    let kf = k as f64;
    Ok((kf * ratio.ln(), kf * (ratio.ln() + 1.0)))
}

/// `R = sqrt(n) (p1 - p0) / sqrt(p0 (1 - p0))`.
pub fn snr(n: u64, p0: f64, p1: f64) -> Result<f64> {
    check_open_unit("p0", p0)?;
    if !(p1 >= p0 && p1 <= 1.0) {
        return Err(Error::domain(format!("p1 = {p1} must lie in [p0, 1]")));
    }
    Ok((n as f64).sqrt() * (p1 - p0) / (p0 * (1.0 - p0)).sqrt())
}

/// `(mean1 - mean0) / max(sd1, sd0)`; diverges for an asymptotically powerful threshold test.
pub fn two_moment_ratio(mean0: f64, var0: f64, mean1: f64, var1: f64) -> Result<f64> {
    if !(var0 >= 0.0 && var1 >= 0.0) {
        return Err(Error::domain("variances must be nonnegative"));
    }
    let sd = var0.sqrt().max(var1.sqrt());
    if sd == 0.0 {
        return if mean1 == mean0 { Err(Error::DegenerateVariance) } else { Ok((mean1 - mean0).signum() * f64::INFINITY) };
    }
    Ok((mean1 - mean0) / sd)
}

/// Probability mass function of Bin(n, p), computed outward from the mode by
/// the ratio recursion so no term underflows before it matters.
#[derive(Clone, Debug)]
pub struct BinomialPmf {
    pmf: Vec<f64>,
}

impl BinomialPmf {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        check_closed_unit("p", p)?;
        let len = n as usize + 1;
        let mut pmf = vec![0.0; len];
        if p == 0.0 {
            pmf[0] = 1.0;
            return Ok(BinomialPmf { pmf });
        }
        if p == 1.0 {
            pmf[len - 1] = 1.0;
            return Ok(BinomialPmf { pmf });
        }
        let mode = (((n + 1) as f64 * p).floor() as usize).min(n as usize);
        let log_mode = ln_binomial(n, mode as u64) + mode as f64 * p.ln() + (n as usize - mode) as f64 * (-p).ln_1p();
        pmf[mode] = log_mode.exp();
        let odds = p / (1.0 - p);
        for k in mode..n as usize {
            pmf[k + 1] = pmf[k] * ((n as usize - k) as f64 / (k + 1) as f64) * odds;
        }
        for k in (0..mode).rev() {
            pmf[k] = pmf[k + 1] * ((k + 1) as f64 / (n as usize - k) as f64) / odds;
        }
        Ok(BinomialPmf { pmf })
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    /// `P(X >= k)`
    pub fn upper_tail(&self, k: usize) -> f64 {
        if k >= self.pmf.len() {
            return 0.0;
        }
        // sum small terms first
        self.pmf[k..].iter().rev().sum::<f64>().min(1.0)
    }

    /// `P(X <= k)`
    pub fn cdf(&self, k: usize) -> f64 {
        let end = (k + 1).min(self.pmf.len());
        self.pmf[..end].iter().sum::<f64>().min(1.0)
    }

    /// Smallest `t` with `P(X > t) <= alpha`.
    pub fn upper_quantile(&self, alpha: f64) -> usize {
        let mut tail = 0.0;
        for t in (0..self.pmf.len()).rev() {
            // tail == P(X > t)
            if tail + self.pmf[t] > alpha {
                return t;
            }
            tail += self.pmf[t];
        }
        0
    }
}

/// Exact `P(Bin(n, p) >= k)`.
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> Result<f64> {
    Ok(BinomialPmf::new(n, p)?.upper_tail(k as usize))
}

/// Two-sided Clopper–Pearson interval for `successes` out of `trials` at confidence `1 - alpha`.
pub fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let half = alpha / 2.0;
    let lower = if successes == 0 {
        0.0
    } else {
        // P(X >= successes | p) increases with p
        bisect(|p| binomial_upper_tail(trials, p, successes).unwrap_or(0.0) - half)
    };
    let upper = if successes == trials {
        1.0
    } else {
        bisect(|p| half - BinomialPmf::new(trials, p).map(|b| b.cdf(successes as usize)).unwrap_or(0.0))
    };
    (lower, upper)
}

/// Root of an increasing function on [0, 1].
fn bisect<F: Fn(f64) -> f64>(f: F) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
