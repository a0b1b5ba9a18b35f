//! Relative entropy of a sample's law with respect to the standard normal.
//!
//! * Binned: plug-in on a Freedman–Diaconis grid over `[-8, 8]` (the outer
//!   bins absorb the tails), minus the Miller–Madow correction
//!   `(K - 1)/(2N)` for `K` occupied bins.
//! * Spacing: `-Ĥ + ½ln(2π) + ½·mean(x²)` with `Ĥ` the `m`-spacing entropy
//!   estimate, `m = round(√N)`, using Ebrahimi's boundary weights.
//!
//! Every estimate carries a Pinsker audit: the total variation between the
//! binned empirical law and the binned normal must not exceed
//! `√(value/2)` plus a sampling tolerance `Σ_j √(q_j(1-q_j)/N)`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::stats::normal_cdf;

pub const MIN_BINNED_SAMPLES: usize = 10_000;
const MIN_SPACING_SAMPLES: usize = 100;
const CLIP: f64 = 8.0;
const MAX_BINS: usize = 100_000;
/// Relative disagreement between the two methods that flags a comparison;
/// differences below `DISAGREEMENT_FLOOR` nats never flag.
const DISAGREEMENT: f64 = 0.25;
const DISAGREEMENT_FLOOR: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlMethod {
    Binned,
    Spacing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinskerAudit {
    pub tv: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub passes: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlEstimate {
    /// Nats, clipped at zero.
    pub value: f64,
    pub method: KlMethod,
    pub sample_count: usize,
    /// Bias correction already subtracted (Miller–Madow for binned, zero for
    /// spacing).
    pub bias_note: f64,
    pub raw_value: f64,
    pub clipped: bool,
    pub pinsker: PinskerAudit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlComparison {
    pub binned: KlEstimate,
    pub spacing: KlEstimate,
    pub relative_disagreement: f64,
    pub flagged: bool,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos - pos.floor());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Equal-width bins over `[lo, hi]` with open outer ends.
struct Grid {
    lo: f64,
    width: f64,
    bins: usize,
}

impl Grid {
    fn new(sorted: &[f64], exponent: f64) -> Result<Self> {
        let n = sorted.len() as f64;
        let iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
        let lo = sorted[0].max(-CLIP);
        let hi = sorted[sorted.len() - 1].min(CLIP);
        let h = 2.0 * iqr * n.powf(-exponent);
        if !(h > 0.0) || !(hi > lo) {
            return Ok(Self { lo: lo.min(hi), width: f64::INFINITY, bins: 1 });
        }
        let bins = (((hi - lo) / h).ceil() as usize).clamp(1, MAX_BINS);
        Ok(Self { lo, width: (hi - lo) / bins as f64, bins })
    }

    fn index(&self, x: f64) -> usize {
        if self.bins == 1 {
            return 0;
        }
        (((x - self.lo) / self.width).floor().max(0.0) as usize).min(self.bins - 1)
    }

    /// Standard normal mass of each bin.
    fn normal_masses(&self) -> Vec<f64> {
        (0..self.bins)
            .map(|j| {
                let a = if j == 0 { f64::NEG_INFINITY } else { self.lo + j as f64 * self.width };
                let b = if j + 1 == self.bins { f64::INFINITY } else { self.lo + (j + 1) as f64 * self.width };
                mass_between(a, b)
            })
            .collect()
    }
}

fn mass_between(a: f64, b: f64) -> f64 {
    // Work in the tail nearer to the interval for accuracy.
    if a >= 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

fn plug_in(counts: &[u64], q: &[f64], n: usize) -> (f64, f64, PinskerParts) {
    let nf = n as f64;
    let mut kl = 0.0;
    let mut occupied = 0usize;
    let mut tv = 0.0;
    let mut tol = 0.0;
    for (&c, &qj) in counts.iter().zip(q) {
        let p = c as f64 / nf;
        if c > 0 {
            occupied += 1;
            kl += p * (p / qj.max(f64::MIN_POSITIVE)).ln();
        }
        tv += (p - qj).abs();
        tol += (qj * (1.0 - qj) / nf).sqrt();
    }
    let bias = occupied.saturating_sub(1) as f64 / (2.0 * nf);
    (kl, bias, PinskerParts { tv: 0.5 * tv, tolerance: tol })
}

struct PinskerParts {
    tv: f64,
    tolerance: f64,
}

fn finish(raw: f64, method: KlMethod, n: usize, bias: f64, parts: PinskerParts) -> KlEstimate {
    let value = raw.max(0.0);
    let bound = (value / 2.0).sqrt();
    KlEstimate {
        value,
        method,
        sample_count: n,
        bias_note: bias,
        raw_value: raw,
        clipped: raw < 0.0,
        pinsker: PinskerAudit {
            tv: parts.tv,
            bound,
            tolerance: parts.tolerance,
            passes: parts.tv <= bound + parts.tolerance,
        },
    }
}

fn binned_parts(sorted: &[f64]) -> Result<(f64, f64, PinskerParts)> {
    let grid = Grid::new(sorted, 1.0 / 3.0)?;
    let mut counts = vec![0u64; grid.bins];
    for &x in sorted {
        counts[grid.index(x)] += 1;
    }
    Ok(plug_in(&counts, &grid.normal_masses(), sorted.len()))
}

fn spacing_value(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let m = ((n as f64).sqrt().round() as usize).clamp(1, n - 1);
    let nf = n as f64;
    let mut h = 0.0;
    for i in 0..n {
        let hi = sorted[(i + m).min(n - 1)];
        let lo = sorted[i.saturating_sub(m)];
        let c = if i < m {
            1.0 + i as f64 / m as f64
        } else if i + m >= n {
            1.0 + (n - 1 - i) as f64 / m as f64
        } else {
            2.0
        };
        h += (nf / (c * m as f64) * (hi - lo).max(f64::MIN_POSITIVE)).ln();
    }
    h /= nf;
    let second = sorted.iter().map(|x| x * x).sum::<f64>() / nf;
    -h + 0.5 * (2.0 * std::f64::consts::PI).ln() + 0.5 * second
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("non-finite sample"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn kl_to_gaussian(samples: &[f64], method: KlMethod) -> Result<KlEstimate> {
    let min = match method {
        KlMethod::Binned => MIN_BINNED_SAMPLES,
        KlMethod::Spacing => MIN_SPACING_SAMPLES,
    };
    if samples.len() < min {
        return Err(Error::invalid(format!("{method:?} estimate needs at least {min} samples, got {}", samples.len())));
    }
    let sorted = sorted_finite(samples)?;
    let (kl, bias, parts) = binned_parts(&sorted)?;
    Ok(match method {
        KlMethod::Binned => finish(kl - bias, method, sorted.len(), bias, parts),
        KlMethod::Spacing => finish(spacing_value(&sorted), method, sorted.len(), 0.0, parts),
    })
}

/// Both estimators on the same sample.
pub fn kl_to_gaussian_both(samples: &[f64]) -> Result<KlComparison> {
    let binned = kl_to_gaussian(samples, KlMethod::Binned)?;
    let spacing = kl_to_gaussian(samples, KlMethod::Spacing)?;
    let gap = (binned.value - spacing.value).abs();
    let relative_disagreement = gap / binned.value.max(spacing.value).max(DISAGREEMENT_FLOOR);
    Ok(KlComparison { binned, spacing, relative_disagreement, flagged: relative_disagreement > DISAGREEMENT })
}

/// Binned estimate of the divergence of a planar sample from `N(0, I₂)`;
/// per-axis widths `2·IQR·N^{-1/4}`.
pub fn kl_to_gaussian_2d(samples: &[[f64; 2]]) -> Result<KlEstimate> {
    if samples.len() < MIN_BINNED_SAMPLES {
        return Err(Error::invalid(format!("at least {MIN_BINNED_SAMPLES} samples required")));
    }
    let axis = |k: usize| sorted_finite(&samples.iter().map(|s| s[k]).collect::<Vec<_>>());
    let (s0, s1) = (axis(0)?, axis(1)?);
    let (g0, g1) = (Grid::new(&s0, 0.25)?, Grid::new(&s1, 0.25)?);
    if g0.bins * g1.bins > 4 * MAX_BINS {
        return Err(Error::Capacity("too many planar bins".into()));
    }
    let mut counts = vec![0u64; g0.bins * g1.bins];
    for s in samples {
        counts[g0.index(s[0]) * g1.bins + g1.index(s[1])] += 1;
    }
    let (q0, q1) = (g0.normal_masses(), g1.normal_masses());
    let q: Vec<f64> = q0.iter().flat_map(|a| q1.iter().map(move |b| a * b)).collect();
    let (kl, bias, parts) = plug_in(&counts, &q, samples.len());
    Ok(finish(kl - bias, KlMethod::Binned, samples.len(), bias, parts))
}

/// Chain rule on a standard bivariate normal with correlation `r`:
/// `D(X₁, X₂) = D(X₁) + E[D(X₂ | X₁)]` with `D(X₁) = 0` and
/// `X₂ | X₁ ~ N(r X₁, 1 - r²)`, against the closed form `-½ln(1 - r²)` and a
/// planar estimate from `samples` draws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleAudit {
    pub r: f64,
    pub closed_form: f64,
    pub marginal: f64,
    pub conditional: f64,
    pub estimate: KlEstimate,
    pub relative_error: f64,
}

pub fn bivariate_chain_rule(r: f64, samples: usize, seed: u64) -> Result<ChainRuleAudit> {
    if !(r.abs() < 1.0) {
        return Err(Error::invalid(format!("correlation {r} must lie in (-1, 1)")));
    }
    let s2 = 1.0 - r * r;
    let closed_form = -0.5 * s2.ln();
    // E over X₁ of ½(σ² + μ² - 1 - ln σ²) with μ = r X₁, E[X₁²] = 1.
    let conditional = 0.5 * (s2 + r * r - 1.0 - s2.ln());
    let mut rng = stream_rng(seed, 0);
    let draws: Vec<[f64; 2]> = (0..samples)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            [a, r * a + s2.sqrt() * b]
        })
        .collect();
    let estimate = kl_to_gaussian_2d(&draws)?;
    Ok(ChainRuleAudit {
        r,
        closed_form,
        marginal: 0.0,
        conditional,
        estimate,
        relative_error: (estimate.value - closed_form).abs() / closed_form,
    })
}
