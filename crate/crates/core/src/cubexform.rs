//! Pair-distance statistics of product sets `A × B ⊆ {0,1}^n × {0,1}^n`.
//!
//! The kernel is the XOR-convolution `(1_A ⋆ 1_B)(z) = #{(x, y) : x ⊕ y = z}`,
//! computed with a Walsh–Hadamard transform in wrapping 64-bit integer
//! arithmetic. Every output is a multiple of `2^n` before the final scaling
//! and the true quotient is at most `min(|A|, |B|) <= 2^n < 2^(64 - n)` for
//! `n < 32`, so reducing modulo `2^64` and shifting right by `n` recovers
//! it exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::CubeSet;
use crate::error::{Error, Result};
use crate::laws::check_correlation;

/// Largest `n` for the dense transform.
pub const MAX_TRANSFORM_N: usize = 26;
/// Largest `|A|·|B|` handled by direct pair enumeration.
pub const MAX_ENUMERATED_PAIRS: u128 = 100_000_000;

const SEQUENTIAL_WHT: usize = 1 << 14;

fn wht(v: &mut [u64]) {
    let len = v.len();
    if len <= SEQUENTIAL_WHT {
        let mut h = 1;
        while h < len {
            for block in v.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x.wrapping_add(y);
                    *b = x.wrapping_sub(y);
                }
            }
            h *= 2;
        }
        return;
    }
    let (lo, hi) = v.split_at_mut(len / 2);
    rayon::join(|| wht(lo), || wht(hi));
    lo.par_iter_mut().zip(hi.par_iter_mut()).with_min_len(4096).for_each(|(a, b)| {
        let (x, y) = (*a, *b);
        *a = x.wrapping_add(y);
        *b = x.wrapping_sub(y);
    });
}

fn check_pair(a: &CubeSet, b: &CubeSet) -> Result<usize> {
    if a.n() != b.n() {
        return Err(Error::invalid(format!("sets over different cubes: n={} and n={}", a.n(), b.n())));
    }
    Ok(a.n())
}

fn indicator(s: &CubeSet) -> Vec<u64> {
    let mut v = vec![0u64; 1usize << s.n()];
    for z in s.members() {
        v[z as usize] = 1;
    }
    v
}

/// `out[z] = #{(x, y) ∈ A × B : x ⊕ y = z}` for every `z ∈ {0,1}^n`.
pub fn xor_convolution(a: &CubeSet, b: &CubeSet) -> Result<Vec<u64>> {
    let n = check_pair(a, b)?;
    if n > MAX_TRANSFORM_N {
        return Err(Error::Capacity(format!(
            "xor convolution over 2^{n} points exceeds the n <= {MAX_TRANSFORM_N} cap"
        )));
    }
    let mut fa = indicator(a);
    let mut fb = indicator(b);
    rayon::join(|| wht(&mut fa), || wht(&mut fb));
    fa.par_iter_mut().zip(fb.par_iter()).for_each(|(x, y)| *x = x.wrapping_mul(*y));
    drop(fb);
    wht(&mut fa);
    fa.par_iter_mut().for_each(|x| *x >>= n);
    Ok(fa)
}

/// `counts[d] = #{(x, y) ∈ A × B : dist(x, y) = d}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceHistogram {
    pub n: usize,
    pub counts: Vec<u64>,
}

impl DistanceHistogram {
    /// `|A|·|B|`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Fraction of pairs at each distance; empty for an empty product.
    pub fn frequencies(&self) -> Vec<f64> {
        let t = self.total();
        if t == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / t as f64).collect()
    }
}

/// Histogram through the transform.
pub fn distance_histogram_via_transform(a: &CubeSet, b: &CubeSet) -> Result<DistanceHistogram> {
    let n = check_pair(a, b)?;
    let conv = xor_convolution(a, b)?;
    let counts = conv
        .par_chunks(1 << 12)
        .enumerate()
        .fold(
            || vec![0u64; n + 1],
            |mut acc, (ci, chunk)| {
                let base = (ci << 12) as u64;
                for (j, &c) in chunk.iter().enumerate() {
                    if c != 0 {
                        acc[(base + j as u64).count_ones() as usize] += c;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; n + 1], |mut x, y| {
            x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
            x
        });
    Ok(DistanceHistogram { n, counts })
}

/// Histogram by enumerating all pairs.
pub fn distance_histogram_via_pairs(a: &CubeSet, b: &CubeSet) -> Result<DistanceHistogram> {
    let n = check_pair(a, b)?;
    let pairs = a.len() as u128 * b.len() as u128;
    if pairs > MAX_ENUMERATED_PAIRS {
        return Err(Error::Capacity(format!(
            "{pairs} pairs exceed the enumeration cap of {MAX_ENUMERATED_PAIRS}"
        )));
    }
    let (xs, ys) = (a.members(), b.members());
    let counts = xs
        .par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut acc, &x| {
                for &y in &ys {
                    acc[(x ^ y).count_ones() as usize] += 1;
                }
                acc
            },
        )
        .reduce(|| vec![0u64; n + 1], |mut x, y| {
            x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
            x
        });
    Ok(DistanceHistogram { n, counts })
}

/// Pair-distance histogram, choosing pair enumeration when it is cheaper than
/// the `n·2^n` transform or when `n` is beyond the transform cap.
pub fn distance_histogram(a: &CubeSet, b: &CubeSet) -> Result<DistanceHistogram> {
    let n = check_pair(a, b)?;
    let pairs = a.len() as u128 * b.len() as u128;
    let transform_cost = if n <= MAX_TRANSFORM_N { (3 * n as u128 + 4) << n } else { u128::MAX };
    if pairs <= MAX_ENUMERATED_PAIRS && pairs < transform_cost {
        distance_histogram_via_pairs(a, b)
    } else {
        distance_histogram_via_transform(a, b)
    }
}

/// `ξ_ρ`-mass of a product set with the given pair-distance histogram:
/// `Σ_d counts[d]·2^{-n}((1+ρ)/2)^{n-d}((1-ρ)/2)^d`.
pub fn xi_measure_of_histogram(hist: &DistanceHistogram, rho: f64) -> Result<f64> {
    check_correlation(rho)?;
    let n = hist.n;
    let (ln_keep, ln_flip) = (((1.0 + rho) / 2.0).ln(), ((1.0 - rho) / 2.0).ln());
    let ln_weight = |d: usize| -> f64 {
        let keep = if n == d { 0.0 } else { (n - d) as f64 * ln_keep };
        let flip = if d == 0 { 0.0 } else { d as f64 * ln_flip };
        keep + flip - n as f64 * std::f64::consts::LN_2
    };
    let safe = (0..=n).all(|d| hist.counts[d] == 0 || ln_weight(d) > -700.0);
    if safe {
        let (keep, flip) = ((1.0 + rho) / 2.0, (1.0 - rho) / 2.0);
        let scale = 0.5f64.powi(n as i32);
        return Ok(hist
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(d, &c)| c as f64 * scale * keep.powi((n - d) as i32) * flip.powi(d as i32))
            .sum());
    }
    let logs: Vec<f64> = hist
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(d, &c)| (c as f64).ln() + ln_weight(d))
        .filter(|l| l.is_finite())
        .collect();
    Ok(log_sum_exp(&logs).exp())
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// `ξ_ρ(A × B)`.
pub fn xi_measure(a: &CubeSet, b: &CubeSet, rho: f64) -> Result<f64> {
    check_correlation(rho)?;
    xi_measure_of_histogram(&distance_histogram(a, b)?, rho)
}

/// Both sides of `½(ξ_{-ρ} + ξ_ρ)(A × B) >= (1 - ε) ξ_0(A × B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeInequalityReport {
    pub n: usize,
    pub rho: f64,
    pub eps: f64,
    pub size_a: usize,
    pub size_b: usize,
    /// `½(ξ_{-ρ} + ξ_ρ)(A × B)`.
    pub lhs: f64,
    /// `(1 - ε) ξ_0(A × B)`.
    pub rhs: f64,
    pub margin: f64,
    pub xi0: f64,
    /// `lhs / ξ_0`; absent for an empty product.
    pub cosh_form: Option<f64>,
    /// `(1-ρ²)^{n/2}·E[cosh(ln((1+ρ)/(1-ρ))·(dist - n/2))]` evaluated
    /// term by term; absent for an empty product or `|ρ| = 1`.
    pub cosh_form_direct: Option<f64>,
    pub empty: bool,
}

fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

pub fn cube_inequality_from_histogram(hist: &DistanceHistogram, rho: f64, eps: f64) -> Result<CubeInequalityReport> {
    check_correlation(rho)?;
    let n = hist.n;
    let total = hist.total();
    if total == 0 {
        return Ok(CubeInequalityReport {
            n,
            rho,
            eps,
            size_a: 0,
            size_b: 0,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            xi0: 0.0,
            cosh_form: None,
            cosh_form_direct: None,
            empty: true,
        });
    }
    let plus = xi_measure_of_histogram(hist, rho)?;
    let minus = xi_measure_of_histogram(hist, -rho)?;
    let xi0 = xi_measure_of_histogram(hist, 0.0)?;
    let lhs = 0.5 * (plus + minus);
    let rhs = (1.0 - eps) * xi0;
    let cosh_form_direct = (rho.abs() < 1.0).then(|| {
        let log_ratio = ((1.0 + rho) / (1.0 - rho)).ln();
        let ln_prefactor = 0.5 * n as f64 * (1.0 - rho * rho).ln();
        let half = n as f64 / 2.0;
        hist.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(d, &c)| c as f64 / total as f64 * (ln_prefactor + ln_cosh(log_ratio * (d as f64 - half))).exp())
            .sum()
    });
    Ok(CubeInequalityReport {
        n,
        rho,
        eps,
        size_a: 0,
        size_b: 0,
        lhs,
        rhs,
        margin: lhs - rhs,
        xi0,
        cosh_form: Some(lhs / xi0),
        cosh_form_direct,
        empty: false,
    })
}

/// Evaluates the anti-concentration inequality for `A × B` at correlation
/// `ρ` and slack `ε`. An empty product reports zero on both sides with the
/// `empty` flag set.
pub fn cube_inequality_margin(a: &CubeSet, b: &CubeSet, rho: f64, eps: f64) -> Result<CubeInequalityReport> {
    check_correlation(rho)?;
    let hist = if a.is_empty() || b.is_empty() {
        DistanceHistogram { n: check_pair(a, b)?, counts: vec![0; a.n() + 1] }
    } else {
        distance_histogram(a, b)?
    };
    let mut report = cube_inequality_from_histogram(&hist, rho, eps)?;
    report.size_a = a.len();
    report.size_b = b.len();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::half_weight_counterexample;
    use crate::rng::stream_rng;
    use crate::stats::choose;
    use proptest::prelude::*;

    fn brute_conv(a: &CubeSet, b: &CubeSet) -> Vec<u64> {
        let mut out = vec![0; 1 << a.n()];
        for x in a.members() {
            for y in b.members() {
                out[(x ^ y) as usize] += 1;
            }
        }
        out
    }

    fn brute_xi(a: &CubeSet, b: &CubeSet, rho: f64) -> f64 {
        let n = a.n() as i32;
        let mut s = 0.0;
        for x in a.members() {
            for y in b.members() {
                let d = (x ^ y).count_ones() as i32;
                s += 0.5f64.powi(n) * ((1.0 + rho) / 2.0).powi(n - d) * ((1.0 - rho) / 2.0).powi(d);
            }
        }
        s
    }

    #[test]
    fn singleton_convolution() {
        let a = CubeSet::from_members(5, [0b10110]).unwrap();
        let b = CubeSet::from_members(5, [0b00111]).unwrap();
        let conv = xor_convolution(&a, &b).unwrap();
        for (z, &c) in conv.iter().enumerate() {
            assert_eq!(c, u64::from(z == 0b10001));
        }
    }

    #[test]
    fn full_sets_convolve_to_constant() {
        let f = CubeSet::full(7).unwrap();
        assert!(xor_convolution(&f, &f).unwrap().iter().all(|&c| c == 128));
        let h = distance_histogram(&f, &f).unwrap();
        for d in 0..=7 {
            assert_eq!(h.counts[d] as u128, 128 * choose(7, d as u64));
        }
    }

    #[test]
    fn transform_exact_at_large_n() {
        // Full sets at n = 20: the transform output is 2^20 at every point.
        let f = CubeSet::full(20).unwrap();
        let h = distance_histogram_via_transform(&f, &f).unwrap();
        assert_eq!(h.total(), 1 << 40);
        assert_eq!(h.counts[10] as u128, (1u128 << 20) * choose(20, 10));
    }

    #[test]
    fn capacity_error_above_cap() {
        let a = CubeSet::from_members(27, [1]).unwrap();
        assert!(matches!(xor_convolution(&a, &a), Err(Error::Capacity(_))));
        // The histogram falls back to enumeration.
        assert_eq!(distance_histogram(&a, &a).unwrap().counts[0], 1);
    }

    #[test]
    fn small_histogram_examples() {
        let a = CubeSet::from_members(2, [0b00]).unwrap();
        let b = CubeSet::from_members(2, [0b11]).unwrap();
        assert_eq!(distance_histogram(&a, &b).unwrap().counts, vec![0, 0, 1]);
        let (a, b) = half_weight_counterexample(8).unwrap();
        let h = distance_histogram_via_transform(&a, &b).unwrap();
        assert_eq!(h.counts, vec![0, 0, 0, 0, 36, 0, 0, 0, 0]);
    }

    #[test]
    fn xi_measure_examples() {
        let mut rng = stream_rng(11, 0);
        let a = CubeSet::random(8, 0.3, &mut rng).unwrap();
        let b = CubeSet::random(8, 0.6, &mut rng).unwrap();
        let uniform = xi_measure(&a, &b, 0.0).unwrap();
        assert!((uniform - (a.len() * b.len()) as f64 / 65536.0).abs() < 1e-15);
        let s = CubeSet::from_members(8, [77]).unwrap();
        let single = xi_measure(&s, &s, 0.4).unwrap();
        assert!((single - 0.5f64.powi(8) * 0.7f64.powi(8)).abs() < 1e-15);
        for rho in [-1.0, -0.7, 0.0, 0.25, 0.9, 1.0] {
            let got = xi_measure(&a, &b, rho).unwrap();
            let want = brute_xi(&a, &b, rho);
            assert!((got - want).abs() <= 1e-12 * want.max(1e-300), "rho={rho}");
        }
    }

    #[test]
    fn full_product_has_mass_one() {
        let f = CubeSet::full(12).unwrap();
        for rho in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            assert!((xi_measure(&f, &f, rho).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn log_space_agrees_in_underflow_regime() {
        let f = CubeSet::full(20).unwrap();
        let h = distance_histogram(&f, &f).unwrap();
        // ρ close to 1 pushes (1-ρ)/2 terms below e^{-700}.
        let rho = 1.0 - 1e-40;
        let v = xi_measure_of_histogram(&h, rho).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn counterexample_ratio() {
        for n in [8, 16] {
            let (a, b) = half_weight_counterexample(n).unwrap();
            for rho in [0.1, 0.5, 0.9] {
                let r = cube_inequality_margin(&a, &b, rho, 0.0).unwrap();
                let want = (1.0 - rho * rho).powi(n as i32 / 2);
                assert!((r.cosh_form.unwrap() / want - 1.0).abs() < 1e-9);
                assert!(r.margin < 0.0);
            }
        }
    }

    #[test]
    fn empty_and_full_cases() {
        let e = CubeSet::empty(6).unwrap();
        let f = CubeSet::full(6).unwrap();
        let r = cube_inequality_margin(&e, &f, 0.5, 0.1).unwrap();
        assert!(r.empty && r.lhs == 0.0 && r.rhs == 0.0 && r.margin == 0.0);
        for rho in [0.0, 0.3, 0.99, 1.0] {
            let r = cube_inequality_margin(&f, &f, rho, 0.0).unwrap();
            assert!(r.margin >= -1e-15, "rho={rho} margin={}", r.margin);
        }
    }

    #[test]
    fn mismatched_cubes_rejected() {
        let a = CubeSet::from_members(3, [1]).unwrap();
        let b = CubeSet::from_members(4, [1]).unwrap();
        assert!(distance_histogram(&a, &b).is_err());
        assert!(xi_measure(&a, &a, 1.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transform_matches_enumeration(n in 1usize..=10, da in 0.0f64..1.0, db in 0.0f64..1.0, seed in any::<u64>()) {
            let mut rng = stream_rng(seed, 0);
            let a = CubeSet::random(n, da, &mut rng).unwrap();
            let b = CubeSet::random(n, db, &mut rng).unwrap();
            prop_assert_eq!(xor_convolution(&a, &b).unwrap(), brute_conv(&a, &b));
            let h = distance_histogram_via_transform(&a, &b).unwrap();
            prop_assert_eq!(h.total(), (a.len() * b.len()) as u64);
            prop_assert_eq!(&h, &distance_histogram_via_pairs(&a, &b).unwrap());
        }

        #[test]
        fn complement_reverses_correlation(n in 1usize..=9, seed in any::<u64>(), rho in -1.0f64..=1.0) {
            let mut rng = stream_rng(seed, 1);
            let a = CubeSet::random(n, 0.4, &mut rng).unwrap();
            let b = CubeSet::random(n, 0.5, &mut rng).unwrap();
            let h = distance_histogram(&a, &b).unwrap();
            let mut rev = h.counts.clone();
            rev.reverse();
            prop_assert_eq!(&distance_histogram(&a, &b.flip_all()).unwrap().counts, &rev);
            // Same terms, summed in reverse order.
            let direct = xi_measure(&a, &b, rho).unwrap();
            let flipped = xi_measure(&a, &b.flip_all(), -rho).unwrap();
            prop_assert!((direct - flipped).abs() <= 1e-14 * direct);
            prop_assert_eq!(direct, xi_measure(&b, &a, rho).unwrap());
        }

        #[test]
        fn cosh_identity(n in 2usize..=10, seed in any::<u64>(), rho in -0.99f64..0.99) {
            let mut rng = stream_rng(seed, 2);
            let a = CubeSet::random(n, 0.5, &mut rng).unwrap();
            let b = CubeSet::random(n, 0.5, &mut rng).unwrap();
            prop_assume!(!a.is_empty() && !b.is_empty());
            let r = cube_inequality_margin(&a, &b, rho, 0.2).unwrap();
            let direct = r.cosh_form_direct.unwrap();
            prop_assert!((direct * r.xi0 / r.lhs - 1.0).abs() < 1e-9);
        }
    }
}
