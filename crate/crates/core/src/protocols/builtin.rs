use rand_distr::{Distribution, StandardNormal};

use super::{Decide, Party, Protocol, PublicCoins, SendOnce};
use crate::bits::{hamming_distance, BitString};
use crate::error::{Error, Result};
use crate::problem::{GhdParams, Label, Problem};
use crate::stats::{choose, ln_choose};

/// Alice sends her whole input; Bob answers `dist > t`.
#[derive(Clone, Debug)]
pub struct TrivialProtocol {
    pub params: GhdParams,
}

pub fn trivial_protocol(params: GhdParams) -> TrivialProtocol {
    TrivialProtocol { params }
}

impl Protocol for TrivialProtocol {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn problem(&self) -> Problem {
        Problem::Ghd(self.params)
    }

    fn declared_cost(&self) -> usize {
        self.params.n
    }

    fn coin_outcomes(&self) -> Option<u64> {
        Some(1)
    }

    fn alice(&self, x: &BitString, _: &PublicCoins) -> Box<dyn Party> {
        Box::new(SendOnce(Some(x.clone())))
    }

    fn bob(&self, y: &BitString, _: &PublicCoins) -> Box<dyn Party> {
        let y = y.clone();
        let t = self.params.t;
        Box::new(Decide(move |x: &BitString| {
            hamming_distance(x, &y).expect("lengths checked by the runner") as f64 > t
        }))
    }
}

/// Public coins pick a uniform `k`-subset `S`; Alice sends `x_S`; Bob counts
/// disagreements `d_S` and outputs 1 iff `d_S > k·t/n`.
#[derive(Clone, Debug)]
pub struct SamplingProtocol {
    pub params: GhdParams,
    pub k: usize,
}

pub fn sampling_protocol(params: GhdParams, k: usize) -> Result<SamplingProtocol> {
    if k == 0 || k > params.n {
        return Err(Error::invalid(format!("sample size k={k} outside 1..={}", params.n)));
    }
    Ok(SamplingProtocol { params, k })
}

/// The `j`-th `k`-subset of `{0..n-1}` in colexicographic order, ascending.
pub fn unrank_subset(n: usize, k: usize, mut j: u128) -> Vec<usize> {
    assert!(j < choose(n as u64, k as u64), "subset rank out of range");
    let mut out = Vec::with_capacity(k);
    let mut top = n;
    for r in (1..=k).rev() {
        // Largest c < top with C(c, r) <= j.
        let mut c = top - 1;
        while choose(c as u64, r as u64) > j {
            c -= 1;
        }
        j -= choose(c as u64, r as u64);
        out.push(c);
        top = c;
    }
    out.reverse();
    out
}

impl SamplingProtocol {
    fn subset(&self, coins: &PublicCoins) -> Vec<usize> {
        match *coins {
            PublicCoins::Enumerated(j) => unrank_subset(self.params.n, self.k, u128::from(j)),
            PublicCoins::Seeded(_) => {
                let mut rng = coins.rng(0);
                let mut s = rand::seq::index::sample(&mut rng, self.params.n, self.k).into_vec();
                s.sort_unstable();
                s
            }
        }
    }

    fn threshold(&self) -> f64 {
        self.k as f64 * self.params.t / self.params.n as f64
    }
}

impl Protocol for SamplingProtocol {
    fn name(&self) -> String {
        format!("sampling(k={})", self.k)
    }

    fn problem(&self) -> Problem {
        Problem::Ghd(self.params)
    }

    fn declared_cost(&self) -> usize {
        self.k
    }

    fn coin_outcomes(&self) -> Option<u64> {
        u64::try_from(choose(self.params.n as u64, self.k as u64)).ok()
    }

    fn alice(&self, x: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        Box::new(SendOnce(Some(x.select(&self.subset(coins)))))
    }

    fn bob(&self, y: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        let ys = y.select(&self.subset(coins));
        let threshold = self.threshold();
        Box::new(Decide(move |xs: &BitString| {
            hamming_distance(xs, &ys).expect("subset sizes agree") as f64 > threshold
        }))
    }
}

/// Error of the sampling protocol on any single pair at distance `d`: the
/// number of disagreements inside `S` is hypergeometric.
pub fn sampling_error_at_distance(p: &SamplingProtocol, d: usize) -> f64 {
    let n = p.params.n;
    let k = p.k;
    let label = p.params.label_at_distance(d);
    if label == Label::Star {
        return 0.0;
    }
    let ln_total = ln_choose(n, k);
    let lo = (k + d).saturating_sub(n);
    let hi = k.min(d);
    (lo..=hi)
        .filter(|&i| label.is_error(i as f64 > p.threshold()))
        .map(|i| (ln_choose(d, i) + ln_choose(n - d, k - i) - ln_total).exp())
        .sum()
}

/// Shared Gaussian directions; Alice sends the `k` signs `⟨r_j, v(x)⟩ < 0`
/// for the embedding `v(x)_i = (-1)^{x_i}/√n` (so `⟨v(x), v(y)⟩ = 1 - 2 dist/n`),
/// Bob outputs 1 ("`⟨x,y⟩ <= -ε`") iff at least half the signs disagree.
///
/// On the cube this decides `ghd_{n, n/2, εn/2}`: inner product `>= ε` is a
/// 0-input, inner product `< -ε` a 1-input.
#[derive(Clone, Debug)]
pub struct HyperplaneProtocol {
    pub dim: usize,
    pub k: usize,
    pub eps: f64,
}

pub fn hyperplane_gip_protocol(dim: usize, k: usize, eps: f64) -> Result<HyperplaneProtocol> {
    if dim == 0 || k == 0 {
        return Err(Error::invalid("dimension and direction count must be positive"));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid(format!("eps={eps} outside [0,1]")));
    }
    Ok(HyperplaneProtocol { dim, k, eps })
}

fn sign_bits(k: usize, coins: &PublicCoins, v: &[f64]) -> BitString {
    let mut rng = coins.rng(0);
    let mut out = BitString::zeros(k);
    for j in 0..k {
        let dot: f64 = v
            .iter()
            .map(|vi| {
                let r: f64 = StandardNormal.sample(&mut rng);
                r * vi
            })
            .sum();
        if dot < 0.0 {
            out.set(j, true);
        }
    }
    out
}

fn embed(x: &BitString) -> Vec<f64> {
    x.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

impl Protocol for HyperplaneProtocol {
    fn name(&self) -> String {
        format!("hyperplane(k={})", self.k)
    }

    fn problem(&self) -> Problem {
        let n = self.dim as f64;
        Problem::Ghd(GhdParams { n: self.dim, t: n / 2.0, g: self.eps * n / 2.0 })
    }

    fn declared_cost(&self) -> usize {
        self.k
    }

    fn alice(&self, x: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        Box::new(SendOnce(Some(sign_bits(self.k, coins, &embed(x)))))
    }

    fn bob(&self, y: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        let mine = sign_bits(self.k, coins, &embed(y));
        let k = self.k;
        Box::new(Decide(move |theirs: &BitString| {
            2 * hamming_distance(theirs, &mine).expect("k sign bits each") >= k
        }))
    }
}

/// Outcome of the hyperplane test on real vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GipAnswer {
    /// `true` for "`⟨x, y⟩ >= ε`".
    pub positive: bool,
    pub disagreements: usize,
    /// Set when an input was not a unit vector and had to be normalized.
    pub normalized: bool,
}

/// The hyperplane test on arbitrary vectors of equal dimension.
pub fn gip_on_vectors(x: &[f64], y: &[f64], k: usize, seed: u64) -> Result<GipAnswer> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::invalid("vectors must be nonempty and of equal dimension"));
    }
    let mut normalized = false;
    let mut unit = |v: &[f64]| -> Result<Vec<f64>> {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("zero or non-finite vector"));
        }
        if (norm - 1.0).abs() > 1e-9 {
            normalized = true;
        }
        Ok(v.iter().map(|a| a / norm).collect())
    };
    let (ux, uy) = (unit(x)?, unit(y)?);
    let coins = PublicCoins::Seeded(seed);
    let disagreements =
        hamming_distance(&sign_bits(k, &coins, &ux), &sign_bits(k, &coins, &uy))?;
    Ok(GipAnswer { positive: 2 * disagreements < k, disagreements, normalized })
}
