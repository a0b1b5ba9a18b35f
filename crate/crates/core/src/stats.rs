//! Small statistics helpers shared by the Monte Carlo routines.

use serde::{Deserialize, Serialize};

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Proportion estimate with a normal-approximation 95% half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub value: f64,
    pub ci95: f64,
    pub trials: u64,
}

impl Proportion {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { value: 0.0, ci95: 0.0, trials };
        }
        let p = successes as f64 / trials as f64;
        Self { value: p, ci95: Z95 * (p * (1.0 - p) / trials as f64).sqrt(), trials }
    }

    pub fn contains(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.ci95
    }
}

/// Binomial(n, q) pmf by the ratio recurrence from the mode, normalized.
/// No factorials are formed, so large `n` neither overflows nor loses the
/// central mass; far tails underflow to zero.
pub fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&q), "success probability {q} outside [0,1]");
    let mut pmf = vec![0.0; n + 1];
    if q == 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if q == 1.0 {
        pmf[n] = 1.0;
        return pmf;
    }
    let mode = (((n + 1) as f64) * q).floor().min(n as f64) as usize;
    let odds = q / (1.0 - q);
    pmf[mode] = 1.0;
    for k in mode..n {
        pmf[k + 1] = pmf[k] * ((n - k) as f64 / (k + 1) as f64) * odds;
    }
    for k in (0..mode).rev() {
        pmf[k] = pmf[k + 1] * ((k + 1) as f64 / (n - k) as f64) / odds;
    }
    let total: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|p| *p /= total);
    pmf
}

/// `ln C(n, k)`.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `C(n, k)` as an exact integer (`n <= 64`).
pub fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 - Φ(x)`, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF.
pub fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}
