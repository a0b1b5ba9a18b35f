//! Gaussian space: correlated pairs, set predicates with conditional
//! samplers, Monte Carlo checks of the noise correlation inequality,
//! Gauss–Hermite quadrature, divergence-from-Gaussian estimators and
//! projection experiments.

mod correlation;
mod divergence;
mod projection;
mod quadrature;
mod sets;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, Rng};
use crate::stats::Proportion;

pub use correlation::{mc_correlation_bound, CorrelationReport};
pub use divergence::{
    bivariate_chain_rule, kl_to_gaussian, kl_to_gaussian_2d, kl_to_gaussian_both, ChainRuleAudit, KlComparison,
    KlEstimate, KlMethod, PinskerAudit, MIN_BINNED_SAMPLES,
};
pub use projection::{projection_experiment, ProjectionExperiment, ProjectionReport};
pub use quadrature::{cosh_expectation_check, gauss_hermite, CoshCheck, DEFAULT_HERMITE_NODES, MAX_HERMITE_NODES};
pub use sets::{opposing_halfspaces, GaussSet, MIN_ACCEPTANCE};

/// Batch size for parallel Monte Carlo; batch `i` uses seed
/// `derive_seed(seed, i)`, so results do not depend on the worker count.
pub(crate) const BATCH: usize = 1 << 14;

/// `(x, ηx + √(1-η²) z)` with `x, z` independent standard Gaussians in `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaPairLaw {
    pub n: usize,
    pub eta: f64,
}

impl EtaPairLaw {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&eta) {
            return Err(Error::invalid(format!("correlation eta={eta} outside [-1, 1]")));
        }
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Self { n, eta })
    }

    pub fn sample_with(&self, rng: &mut Rng) -> (Vec<f64>, Vec<f64>) {
        let c = (1.0 - self.eta * self.eta).sqrt();
        let mut x = Vec::with_capacity(self.n);
        let mut y = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let a: f64 = StandardNormal.sample(rng);
            let z: f64 = StandardNormal.sample(rng);
            x.push(a);
            y.push(self.eta * a + c * z);
        }
        (x, y)
    }
}

pub fn sample_eta_pair(law: &EtaPairLaw, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    EtaPairLaw::new(law.n, law.eta)?;
    Ok(law.sample_with(&mut stream_rng(seed, 0)))
}

/// `ρ = 1 - (2/π) arccos η`: the correlation of the signs of an
/// `η`-correlated scalar pair.
pub fn sign_map(eta: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("eta={eta} outside [-1, 1]")));
    }
    Ok(1.0 - 2.0 / std::f64::consts::PI * eta.acos())
}

/// `η = cos(π(1 - ρ)/2)`.
pub fn sign_map_inverse(rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho={rho} outside [-1, 1]")));
    }
    Ok((std::f64::consts::PI * (1.0 - rho) / 2.0).cos())
}

/// Monte Carlo `Pr[sign x ≠ sign y]` for a scalar `η`-correlated pair.
pub fn sign_disagreement_rate(eta: f64, trials: u64, seed: u64) -> Result<Proportion> {
    let law = EtaPairLaw::new(1, eta)?;
    let hits = batched_count(trials, seed, |rng| {
        let (x, y) = law.sample_with(rng);
        (x[0] < 0.0) != (y[0] < 0.0)
    });
    Ok(Proportion::from_counts(hits, trials))
}

fn batched_count(trials: u64, seed: u64, event: impl Fn(&mut Rng) -> bool + Sync) -> u64 {
    let batches = trials.div_ceil(BATCH as u64);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(derive_seed(seed, b), 0);
            let len = (trials - b * BATCH as u64).min(BATCH as u64);
            (0..len).filter(|_| event(&mut rng)).count() as u64
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConcentration {
    pub n: usize,
    pub beta: f64,
    /// Fraction of draws with `‖x‖²` outside `[(1-β)n, (1+β)n]`.
    pub outside: Proportion,
    /// The same probability from the chi-square law.
    pub exact: f64,
}

pub fn gaussian_norm_concentration(n: usize, beta: f64, trials: u64, seed: u64) -> Result<NormConcentration> {
    if n == 0 || !(beta >= 0.0) {
        return Err(Error::invalid(format!("n={n}, beta={beta}")));
    }
    let (lo, hi) = ((1.0 - beta) * n as f64, (1.0 + beta) * n as f64);
    let hits = batched_count(trials, seed, |rng| {
        let r2: f64 = (0..n)
            .map(|_| {
                let v: f64 = StandardNormal.sample(rng);
                v * v
            })
            .sum();
        r2 < lo || r2 > hi
    });
    let chi = ChiSquared::new(n as f64).map_err(|e| Error::invalid(e.to_string()))?;
    let exact = if beta == 0.0 { 1.0 } else { chi.cdf(lo.max(0.0)) + chi.sf(hi) };
    Ok(NormConcentration { n, beta, outside: Proportion::from_counts(hits, trials), exact })
}

/// Squared projections of each vector onto the span of its predecessors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaOrthogonality {
    /// Whether every squared projection is at most `δ` (up to `1e-12`).
    pub ok: bool,
    pub max_proj_sq: f64,
    pub proj_sq: Vec<f64>,
    /// Indices kept by scanning in order and keeping each vector whose
    /// squared projection onto the span of those already kept is at most `δ`.
    pub greedy_subsequence: Vec<usize>,
    /// Norm of each vector's component orthogonal to its predecessors.
    pub residual_norms: Vec<f64>,
}

const UNIT_TOLERANCE: f64 = 1e-9;
const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Orthonormal basis grown by Gram–Schmidt with one re-orthogonalization pass.
struct Basis(Vec<Vec<f64>>);

impl Basis {
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.0 {
                let c: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(ri, qi)| *ri -= c * qi);
            }
        }
        r
    }

    fn push(&mut self, residual: Vec<f64>) {
        let len = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 1e-12 {
            self.0.push(residual.into_iter().map(|v| v / len).collect());
        }
    }
}

pub fn delta_orthogonality(vectors: &[Vec<f64>], delta: f64) -> Result<DeltaOrthogonality> {
    let dim = vectors.first().map_or(0, Vec::len);
    for (i, v) in vectors.iter().enumerate() {
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if v.len() != dim || (len - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::invalid(format!("vector {i} is not a unit vector of dimension {dim}")));
        }
    }
    let mut all = Basis(Vec::new());
    let mut kept = Basis(Vec::new());
    let mut proj_sq = Vec::with_capacity(vectors.len());
    let mut residual_norms = Vec::with_capacity(vectors.len());
    let mut greedy = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let r = all.residual(v);
        let rr: f64 = r.iter().map(|a| a * a).sum();
        proj_sq.push((1.0 - rr).max(0.0));
        residual_norms.push(rr.sqrt());
        all.push(r);
        let rk = kept.residual(v);
        let kept_proj = 1.0 - rk.iter().map(|a| a * a).sum::<f64>();
        if kept_proj <= delta + BOUNDARY_TOLERANCE {
            greedy.push(i);
            kept.push(rk);
        }
    }
    let max_proj_sq = proj_sq.iter().copied().fold(0.0, f64::max);
    Ok(DeltaOrthogonality {
        ok: proj_sq.iter().all(|&p| p <= delta + BOUNDARY_TOLERANCE),
        max_proj_sq,
        proj_sq,
        greedy_subsequence: greedy,
        residual_norms,
    })
}

/// Uniform point on the unit sphere of `R^n`.
pub fn random_unit_vector(n: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 0.0 {
            return v.into_iter().map(|a| a / len).collect();
        }
    }
}
