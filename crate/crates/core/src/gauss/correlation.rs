use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GaussSet, BATCH};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::stats::Z95;

pub const MIN_TRIALS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub n: usize,
    pub eta: f64,
    pub trials: u64,
    /// `Pr[x ∈ A, y ∈ B]` under `η`-correlation.
    pub p_plus: f64,
    /// The same under `-η`-correlation.
    pub p_minus: f64,
    pub g_a: f64,
    /// Estimated from both `y` draws.
    pub g_b: f64,
    /// `½(p₊ + p₋) / (g_A g_B)`.
    pub ratio: f64,
    pub ci95: f64,
    /// `p₊ / (g_A g_B)`.
    pub one_sided_ratio: f64,
    pub one_sided_ci95: f64,
    pub exact_g_a: Option<f64>,
    pub exact_g_b: Option<f64>,
    pub a_symmetric: bool,
    pub b_symmetric: bool,
    /// Coordinates actually drawn per vector. Sets that depend on a few
    /// leading coordinates only are tested on those; the rest are
    /// independent of the event.
    pub sampled_dims: usize,
}

/// Per-trial vector `(a·b₊, a·b₋, a, (b₊ + b₋)/2)`: sums and cross sums.
#[derive(Clone, Copy, Default)]
struct Moments {
    s: [f64; 4],
    ss: [[f64; 4]; 4],
}

impl Moments {
    fn add(&mut self, v: [f64; 4]) {
        for i in 0..4 {
            self.s[i] += v[i];
            for j in 0..4 {
                self.ss[i][j] += v[i] * v[j];
            }
        }
    }

    fn merge(mut self, o: Moments) -> Moments {
        for i in 0..4 {
            self.s[i] += o.s[i];
            for j in 0..4 {
                self.ss[i][j] += o.ss[i][j];
            }
        }
        self
    }
}

/// Delta-method half-width for a smooth function of the four means.
fn delta_ci(m: &Moments, trials: f64, grad: [f64; 4]) -> f64 {
    let mean: Vec<f64> = m.s.iter().map(|s| s / trials).collect();
    let mut var = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let cov = (m.ss[i][j] - trials * mean[i] * mean[j]) / (trials - 1.0);
            var += grad[i] * grad[j] * cov;
        }
    }
    Z95 * (var.max(0.0) / trials).sqrt()
}

/// Monte Carlo estimate of `Pr[x ∈ A ∧ y ∈ B]` under `±η`-correlation
/// against `γ(A)γ(B)`, all on common random numbers: each trial draws
/// `x, z` once and uses `y± = ±ηx + √(1-η²) z`.
pub fn mc_correlation_bound(
    a: &GaussSet,
    b: &GaussSet,
    n: usize,
    eta: f64,
    trials: u64,
    seed: u64,
) -> Result<CorrelationReport> {
    a.validate(n)?;
    b.validate(n)?;
    if !(-1.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("eta={eta} outside [-1, 1]")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("at least {MIN_TRIALS} trials required, got {trials}")));
    }
    let dims = match (a.leading_support(), b.leading_support()) {
        (Some(p), Some(q)) => p.max(q).clamp(1, n),
        _ => n,
    };
    let c = (1.0 - eta * eta).sqrt();
    let batches = trials.div_ceil(BATCH as u64);
    let m = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = stream_rng(derive_seed(seed, bi), 0);
            let len = (trials - bi * BATCH as u64).min(BATCH as u64);
            let (mut x, mut yp, mut ym) = (vec![0.0; dims], vec![0.0; dims], vec![0.0; dims]);
            let mut m = Moments::default();
            for _ in 0..len {
                for i in 0..dims {
                    let xi: f64 = StandardNormal.sample(&mut rng);
                    let zi: f64 = StandardNormal.sample(&mut rng);
                    x[i] = xi;
                    yp[i] = eta * xi + c * zi;
                    ym[i] = -eta * xi + c * zi;
                }
                let ia = f64::from(u8::from(a.contains(&x)));
                let bp = f64::from(u8::from(b.contains(&yp)));
                let bm = f64::from(u8::from(b.contains(&ym)));
                m.add([ia * bp, ia * bm, ia, 0.5 * (bp + bm)]);
            }
            m
        })
        .reduce(Moments::default, Moments::merge);
    let t = trials as f64;
    let (p_plus, p_minus, g_a, g_b) = (m.s[0] / t, m.s[1] / t, m.s[2] / t, m.s[3] / t);
    if g_a * g_b < 1e-6 {
        return Err(Error::Infeasible(format!(
            "estimated gamma(A)·gamma(B) = {:e} below 1e-6; the ratio is not resolvable by sampling",
            g_a * g_b
        )));
    }
    let prod = g_a * g_b;
    let ratio = 0.5 * (p_plus + p_minus) / prod;
    let one = p_plus / prod;
    Ok(CorrelationReport {
        n,
        eta,
        trials,
        p_plus,
        p_minus,
        g_a,
        g_b,
        ratio,
        ci95: delta_ci(&m, t, [0.5 / prod, 0.5 / prod, -ratio / g_a, -ratio / g_b]),
        one_sided_ratio: one,
        one_sided_ci95: delta_ci(&m, t, [1.0 / prod, 0.0, -one / g_a, -one / g_b]),
        exact_g_a: a.exact_measure(n),
        exact_g_b: b.exact_measure(n),
        a_symmetric: a.is_symmetric(),
        b_symmetric: b.is_symmetric(),
        sampled_dims: dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::opposing_halfspaces;
    use crate::stats::normal_sf;

    #[test]
    fn whole_space_ratio_is_one() {
        let r = mc_correlation_bound(&GaussSet::Whole, &GaussSet::Whole, 10, 0.3, 10_000, 1).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.ci95, 0.0);
        assert_eq!(r.sampled_dims, 1);
    }

    #[test]
    fn independence_at_zero() {
        let a = GaussSet::SymmetricSlab { a: None, t: 0.8 };
        let b = GaussSet::Halfspace { a: vec![1.0, 1.0], t: 0.2 };
        let r = mc_correlation_bound(&a, &b, 30, 0.0, 200_000, 4).unwrap();
        assert!((r.ratio - 1.0).abs() <= r.ci95, "{r:?}");
        assert_eq!(r.p_plus, r.p_minus);
    }

    #[test]
    fn slab_against_halfspace() {
        let n = 100;
        let a = GaussSet::SymmetricSlab { a: None, t: 1.0 };
        let b = GaussSet::Halfspace { a: vec![1.0], t: 0.5 };
        let r = mc_correlation_bound(&a, &b, n, 0.5 / (n as f64).sqrt(), 200_000, 5).unwrap();
        assert!(r.one_sided_ratio + r.one_sided_ci95 >= 0.95, "{r:?}");
    }

    #[test]
    fn opposing_halfspaces_fall_short() {
        let n = 100;
        let eta = 0.5 / (n as f64).sqrt();
        let mut last = f64::INFINITY;
        for t in [1.0, 2.0] {
            let (a, b) = opposing_halfspaces(t);
            let r = mc_correlation_bound(&a, &b, n, eta, 1_000_000, 6).unwrap();
            assert!(r.one_sided_ratio + r.one_sided_ci95 < 1.0, "{r:?}");
            assert!(r.one_sided_ratio < last);
            last = r.one_sided_ratio;
            assert_eq!(r.exact_g_a, Some(normal_sf(t)));
        }
    }

    #[test]
    fn too_few_trials_or_tiny_sets() {
        assert!(mc_correlation_bound(&GaussSet::Whole, &GaussSet::Whole, 3, 0.1, 100, 0).is_err());
        let far = GaussSet::Halfspace { a: vec![1.0], t: 6.0 };
        assert!(matches!(
            mc_correlation_bound(&far, &far, 3, 0.1, 10_000, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn exchangeable() {
        // Pr[x ∈ A, y ∈ B] = Pr[y ∈ A, x ∈ B].
        let a = GaussSet::Halfspace { a: vec![1.0, 2.0], t: 0.3 };
        let b = GaussSet::CoordThreshold { t: 0.7, coord: 0 };
        let r1 = mc_correlation_bound(&a, &b, 5, 0.4, 400_000, 8).unwrap();
        let r2 = mc_correlation_bound(&b, &a, 5, 0.4, 400_000, 9).unwrap();
        let se = (r1.p_plus * (1.0 - r1.p_plus) * 2.0 / 400_000.0).sqrt();
        assert!((r1.p_plus - r2.p_plus).abs() < 3.0 * se, "{} {}", r1.p_plus, r2.p_plus);
    }
}
