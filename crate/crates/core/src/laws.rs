//! Correlated input laws on the cube and their distance distributions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Rng as LabRng};
use crate::stats::binomial_pmf;

/// `ξ_p`: `x` uniform on `{0,1}^n`, `y` obtained from `x` by flipping each bit
/// independently with probability `(1 - p) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubePairLaw {
    pub n: usize,
    pub p: f64,
}

impl CubePairLaw {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_correlation(p)?;
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        Ok(Self { n, p })
    }

    pub fn flip_probability(&self) -> f64 {
        (1.0 - self.p) / 2.0
    }

    /// Draw a pair from the given generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> (BitString, BitString) {
        let x = BitString::random(self.n, rng);
        let q = self.flip_probability();
        let mut y = x.clone();
        for i in 0..self.n {
            if rng.random_bool(q) {
                y.flip(i);
            }
        }
        (x, y)
    }
}

pub(crate) fn check_correlation(p: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("correlation {p} outside [-1, 1]")));
    }
    Ok(())
}

/// One draw from `ξ_p`; a pure function of `(law, seed)`.
pub fn sample_xi(law: &CubePairLaw, seed: u64) -> Result<(BitString, BitString)> {
    check_correlation(law.p)?;
    Ok(law.sample_with(&mut stream_rng(seed, 0)))
}

/// Uniform pair at Hamming distance exactly `d`: `x` uniform, then a uniform
/// `d`-subset of coordinates flipped.
pub fn sample_pair_at_distance(n: usize, d: usize, rng: &mut LabRng) -> (BitString, BitString) {
    assert!(d <= n, "distance {d} exceeds length {n}");
    let x = BitString::random(n, rng);
    let mut y = x.clone();
    for i in rand::seq::index::sample(rng, n, d) {
        y.flip(i);
    }
    (x, y)
}

/// Distribution of `dist(x, y)` under `ξ_p`: Binomial(n, (1 - p) / 2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceLaw {
    pub n: usize,
    pub p: f64,
    pub pmf: Vec<f64>,
}

impl DistanceLaw {
    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(d, w)| d as f64 * w).sum()
    }

    /// `Pr[dist <= x]` for a real bound `x`.
    pub fn cdf_at_most(&self, x: f64) -> f64 {
        self.pmf.iter().enumerate().filter(|(d, _)| (*d as f64) <= x).map(|(_, w)| w).sum()
    }

    /// `Pr[dist >= x]` for a real bound `x`.
    pub fn tail_at_least(&self, x: f64) -> f64 {
        self.pmf.iter().enumerate().filter(|(d, _)| (*d as f64) >= x).map(|(_, w)| w).sum()
    }

    /// Convex combination of laws over the same `n`.
    pub fn mixture(parts: &[(f64, &DistanceLaw)]) -> Result<Vec<f64>> {
        let n = parts.first().ok_or_else(|| Error::invalid("empty mixture"))?.1.n;
        let mut out = vec![0.0; n + 1];
        for (w, law) in parts {
            if law.n != n {
                return Err(Error::invalid("mixture components over different n"));
            }
            for (o, p) in out.iter_mut().zip(&law.pmf) {
                *o += w * p;
            }
        }
        Ok(out)
    }
}

/// `μ_{n,p}`: the binomial law with parameters `n` and `(1 - p) / 2`.
pub fn distance_law(n: usize, p: f64) -> Result<DistanceLaw> {
    check_correlation(p)?;
    Ok(DistanceLaw { n, p, pmf: binomial_pmf(n, (1.0 - p) / 2.0) })
}

/// Result of the tail-constant search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConstant {
    pub b: f64,
    /// `Pr[dist <= n/2 - (b + √2)√n]` under `ξ_{4b/√n}`.
    pub zero_side: f64,
    /// `Pr[dist >= n/2 - (b - √2)√n]` under `ξ_0`.
    pub one_side: f64,
}

/// Smallest `b` on the 0.01 grid for which both tail bounds
///
/// * `Pr_{ξ_{4b/√n}}[dist <= n/2 - (b + √2)√n] >= 1 - eps`
/// * `Pr_{ξ_0}[dist >= n/2 - (b - √2)√n] >= 1 - eps`
///
/// hold at this `n`, evaluated with exact binomial CDFs. Only `b` with
/// `4b/√n <= 1` and `(b + √2)√n <= n/2` are admissible.
pub fn binomial_tail_b(eps: f64, n: usize) -> Result<TailConstant> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps={eps} outside (0,1)")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let nf = n as f64;
    let root = nf.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let uniform = distance_law(n, 0.0)?;
    for step in 1u32.. {
        let b = f64::from(step) / 100.0;
        let rho = 4.0 * b / root;
        if rho > 1.0 || (b + sqrt2) * root > nf / 2.0 {
            break;
        }
        let zero_side = distance_law(n, rho)?.cdf_at_most(nf / 2.0 - (b + sqrt2) * root);
        let one_side = uniform.tail_at_least(nf / 2.0 - (b - sqrt2) * root);
        if zero_side >= 1.0 - eps && one_side >= 1.0 - eps {
            return Ok(TailConstant { b, zero_side, one_side });
        }
    }
    Err(Error::Infeasible(format!(
        "no b with 4b/sqrt(n) <= 1 and (b+sqrt2)sqrt(n) <= n/2 meets both tail bounds at eps={eps}, n={n}"
    )))
}
