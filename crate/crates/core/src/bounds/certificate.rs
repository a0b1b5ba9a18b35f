use serde::{Deserialize, Serialize};

use super::{mass_on_rectangle, PairDistribution, Rectangle, WeightedPart};
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::problem::{GhdParams, Label};

/// Distributions and constants for the corruption inequality with a joker
/// distribution:
/// `α₁ μ₁(R) - α₊ μ₊(R) <= α₀ μ₀(R) + 2^{-m}` for every rectangle `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionCertificate {
    pub mu0: PairDistribution,
    pub mu1: PairDistribution,
    pub muplus: PairDistribution,
    pub alpha0: Fraction,
    pub alpha1: Fraction,
    pub alphaplus: Fraction,
    pub eps: Fraction,
    pub m: f64,
}

/// The distributional lower bound the certificate yields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateBound {
    /// `α₁ - α₊ - (α₀ + α₁) ε`.
    pub slack0: Fraction,
    pub eps_prime: Fraction,
    /// `2^β = α₁ - α₊ - (α₀ + α₁)(ε + ε')`.
    pub two_pow_beta: Fraction,
    pub beta: f64,
    pub bound: f64,
    /// Hard distribution `(α₀ μ₀ + α₁ μ₁) / (α₀ + α₁)`.
    pub nu: PairDistribution,
}

/// The certificate used for ghd with threshold `n/2 - b√n`: `μ₀ = ξ_ρ`,
/// `μ₁ = ξ₀`, `μ₊ = ξ_{-ρ}` with `ρ = 4b/√n`, `α₁ = 2/3`, `α₀ = α₊ = 1/2`,
/// `ε = 1/8`.
pub fn ghd_joker_certificate(n: usize, b: f64, m: f64) -> Result<CorruptionCertificate> {
    let rho = 4.0 * b / (n as f64).sqrt();
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("4b/sqrt(n) = {rho} outside [0,1]")));
    }
    Ok(CorruptionCertificate {
        mu0: PairDistribution::Xi { p: rho },
        mu1: PairDistribution::Xi { p: 0.0 },
        muplus: PairDistribution::Xi { p: -rho },
        alpha0: Fraction::new(1, 2),
        alpha1: Fraction::new(2, 3),
        alphaplus: Fraction::new(1, 2),
        eps: Fraction::new(1, 8),
        m,
    })
}

pub fn corruption_lower_bound(cert: &CorruptionCertificate) -> Result<CertificateBound> {
    let zero = Fraction::zero();
    if !cert.alpha0.is_positive() || !cert.alpha1.is_positive() || cert.alphaplus < zero || cert.eps < zero {
        return Err(Error::invalid("alpha0, alpha1 must be positive and alphaplus, eps nonnegative"));
    }
    if !cert.m.is_finite() {
        return Err(Error::invalid("m must be finite"));
    }
    let total = cert.alpha0 + cert.alpha1;
    let threshold = (cert.alpha1 - cert.alphaplus) / total;
    if cert.eps >= threshold {
        return Err(Error::Infeasible(format!(
            "eps = {} is not below (alpha1 - alphaplus)/(alpha0 + alpha1) = {threshold}",
            cert.eps
        )));
    }
    let slack0 = cert.alpha1 - cert.alphaplus - total * cert.eps;
    let two = Fraction::new(2, 1);
    let eps_prime = slack0 / (two * total);
    let two_pow_beta = slack0 - total * eps_prime;
    let beta = two_pow_beta.to_f64().log2();
    let nu = PairDistribution::Mixture {
        parts: vec![
            WeightedPart { weight: (cert.alpha0 / total).to_f64(), law: cert.mu0.clone() },
            WeightedPart { weight: (cert.alpha1 / total).to_f64(), law: cert.mu1.clone() },
        ],
    };
    Ok(CertificateBound { slack0, eps_prime, two_pow_beta, beta, bound: cert.m + beta, nu })
}

/// `α₀ μ₀(R) + 2^{-m} - α₁ μ₁(R) + α₊ μ₊(R)`, the amount by which the joker
/// inequality holds on `R`.
pub fn slack(cert: &CorruptionCertificate, r: &Rectangle) -> Result<f64> {
    Ok(cert.alpha0.to_f64() * mass_on_rectangle(&cert.mu0, r)?
        - cert.alpha1.to_f64() * mass_on_rectangle(&cert.mu1, r)?
        + cert.alphaplus.to_f64() * mass_on_rectangle(&cert.muplus, r)?
        + (-cert.m).exp2())
}

/// How much of `μ₀` and `μ₁` sits on the 0- and 1-inputs of `ghd`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub mu0_on_zero: f64,
    pub mu1_on_one: f64,
    pub holds: bool,
}

pub fn support_condition(cert: &CorruptionCertificate, params: &GhdParams) -> Result<SupportCheck> {
    let n = params.n;
    let labels: Vec<Label> = (0..=n).map(|d| params.label_at_distance(d)).collect();
    let mu0_on_zero = cert.mu0.mass_on_label(n, &labels, Label::Zero)?;
    let mu1_on_one = cert.mu1.mass_on_label(n, &labels, Label::One)?;
    let floor = 1.0 - cert.eps.to_f64();
    Ok(SupportCheck { mu0_on_zero, mu1_on_one, holds: mu0_on_zero >= floor && mu1_on_one >= floor })
}

/// Slack of a disjoint family computed rectangle by rectangle and directly
/// on the union. The additive `2^{-m}` enters once per rectangle on both
/// paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackAudit {
    pub summed: f64,
    pub direct: f64,
    pub additive_terms: f64,
    pub difference: f64,
}

/// Largest `n` for the direct path, which marks the union in a `4^n` table.
const MAX_AUDIT_N: usize = 10;

pub fn partition_slack_audit(cert: &CorruptionCertificate, rectangles: &[Rectangle]) -> Result<SlackAudit> {
    let Some(first) = rectangles.first() else {
        return Err(Error::invalid("empty rectangle family"));
    };
    let n = first.n();
    if rectangles.iter().any(|r| r.n() != n) {
        return Err(Error::invalid("rectangles over different cubes"));
    }
    if n > MAX_AUDIT_N {
        return Err(Error::Capacity(format!("direct union evaluation needs n <= {MAX_AUDIT_N}")));
    }
    for (i, a) in rectangles.iter().enumerate() {
        for (j, b) in rectangles.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(Error::invalid(format!("rectangles {i} and {j} overlap")));
            }
        }
    }
    let additive = rectangles.len() as f64 * (-cert.m).exp2();
    let mut summed = 0.0;
    for r in rectangles {
        summed += slack(cert, r)?;
    }

    let mut in_union = vec![false; 1 << (2 * n)];
    for r in rectangles {
        let cols = r.cols.members();
        for x in r.rows.members() {
            for &y in &cols {
                in_union[((x << n) | y) as usize] = true;
            }
        }
    }
    let (a0, a1, ap) = (cert.alpha0.to_f64(), cert.alpha1.to_f64(), cert.alphaplus.to_f64());
    let per_distance: Vec<f64> = (0..=n)
        .map(|d| a0 * cert.mu0.pair_mass(n, d) - a1 * cert.mu1.pair_mass(n, d) + ap * cert.muplus.pair_mass(n, d))
        .collect();
    let direct = in_union
        .iter()
        .enumerate()
        .filter(|(_, &inside)| inside)
        .map(|(idx, _)| {
            let (x, y) = (idx >> n, idx & ((1 << n) - 1));
            per_distance[(x ^ y).count_ones() as usize]
        })
        .sum::<f64>()
        + additive;
    Ok(SlackAudit { summed, direct, additive_terms: additive, difference: (summed - direct).abs() })
}
